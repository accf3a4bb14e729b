"""Confusion matrices and the five classification metrics.

Any 0/0 metric (for example precision with no positive predictions) is
defined as 0 and the metric's name is recorded in the ``degenerate``
list, so reports stay finite while still flagging the collapse.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError


@dataclass
class ConfusionMatrix:
    """Counts indexed [true class][predicted class]."""

    counts: np.ndarray
    label_names: tuple[str, ...]

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.label_names = tuple(self.label_names)
        c = len(self.label_names)
        if self.counts.shape != (c, c):
            raise DataError(f"confusion matrix must be {c}x{c}, got {self.counts.shape}")
        if (self.counts < 0).any():
            raise DataError("confusion matrix entries must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def n_classes(self) -> int:
        return len(self.label_names)


@dataclass
class MetricSet:
    sensitivity: float
    specificity: float
    precision: float
    f1: float
    accuracy: float
    degenerate: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "precision": self.precision,
            "f1": self.f1,
            "accuracy": self.accuracy,
        }


def confusion_matrix(y_true, y_pred, n_classes: int, label_names=None) -> ConfusionMatrix:
    t = np.asarray(y_true, dtype=np.int64)
    p = np.asarray(y_pred, dtype=np.int64)
    if t.size == 0 or t.shape != p.shape or t.ndim != 1:
        raise DataError(
            f"need equal-length non-empty label vectors, got {t.shape} and {p.shape}"
        )
    if t.min() < 0 or p.min() < 0 or t.max() >= n_classes or p.max() >= n_classes:
        raise DataError(f"labels must lie in [0, {n_classes})")
    if label_names is None:
        label_names = tuple(f"class{i}" for i in range(n_classes))
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts, label_names)


def _ratio(num: int, den: int, name: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def binary_metrics(cm: ConfusionMatrix, positive: int = 0) -> MetricSet:
    """Sensitivity, specificity, precision, F1, accuracy for a 2x2 matrix."""
    if cm.n_classes != 2:
        raise ConfigError(f"binary metrics need a 2x2 matrix, got {cm.n_classes} classes")
    if positive not in (0, 1):
        raise ConfigError(f"positive class must be 0 or 1, got {positive}")
    neg = 1 - positive
    tp = int(cm.counts[positive, positive])
    fn = int(cm.counts[positive, neg])
    fp = int(cm.counts[neg, positive])
    tn = int(cm.counts[neg, neg])
    flags: list[str] = []
    sens = _ratio(tp, tp + fn, "sensitivity", flags)
    spec = _ratio(tn, tn + fp, "specificity", flags)
    prec = _ratio(tp, tp + fp, "precision", flags)
    if prec + sens > 0:
        f1 = 2.0 * prec * sens / (prec + sens)
    else:
        flags.append("f1")
        f1 = 0.0
    acc = (tp + tn) / cm.total
    return MetricSet(sens, spec, prec, f1, acc, tuple(flags))


def multiclass_metrics(cm: ConfusionMatrix) -> MetricSet:
    """Macro one-vs-rest averages; accuracy stays trace/total."""
    if cm.n_classes < 2:
        raise ConfigError("need at least 2 classes")
    flags: list[str] = []
    sums = {"sensitivity": 0.0, "specificity": 0.0, "precision": 0.0, "f1": 0.0}
    for c in range(cm.n_classes):
        reduced = _one_vs_rest(cm, c)
        part = binary_metrics(reduced, positive=0)
        sums["sensitivity"] += part.sensitivity
        sums["specificity"] += part.specificity
        sums["precision"] += part.precision
        sums["f1"] += part.f1
        flags.extend(f"{name}:{cm.label_names[c]}" for name in part.degenerate)
    k = cm.n_classes
    accuracy = int(np.trace(cm.counts)) / cm.total
    return MetricSet(
        sums["sensitivity"] / k,
        sums["specificity"] / k,
        sums["precision"] / k,
        sums["f1"] / k,
        accuracy,
        tuple(flags),
    )


def _one_vs_rest(cm: ConfusionMatrix, c: int) -> ConfusionMatrix:
    tp = int(cm.counts[c, c])
    fn = int(cm.counts[c].sum()) - tp
    fp = int(cm.counts[:, c].sum()) - tp
    tn = cm.total - tp - fn - fp
    return ConfusionMatrix(
        np.array([[tp, fn], [fp, tn]], dtype=np.int64),
        (cm.label_names[c], "rest"),
    )
