"""Univariate chi-squared feature scoring and top-K masking.

For feature j the statistic compares the class-wise sums of the feature's
values (observed) with what class-independent values would give
(expected from the class priors):

    O[c]  = sum of x[i, j] over rows i with label c
    E[c]  = (n_c / n) * sum of x[:, j]
    score = sum over classes of (O[c] - E[c])**2 / E[c]

A column that sums to zero scores 0 by convention, so degenerate columns
rank last instead of aborting a run. Values must be non-negative; the
statistic treats them as per-class mass.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ConfigError, DataError


@dataclass
class ChiSquareScores:
    """Per-feature chi-squared statistics, aligned with feature columns."""

    scores: np.ndarray

    def __post_init__(self) -> None:
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 1:
            raise DataError("scores must be a 1-d vector")


@dataclass
class FeatureMask:
    """A sorted set of selected feature indices."""

    selected: np.ndarray

    def __post_init__(self) -> None:
        self.selected = np.asarray(self.selected, dtype=np.int64)

    @property
    def k(self) -> int:
        return self.selected.size


def chi2_scores(dataset: Dataset) -> ChiSquareScores:
    """Score each feature's dependence on the class label."""
    X = dataset.features
    if (X < 0).any():
        r, c = np.argwhere(X < 0)[0]
        raise DataError(
            f"negative feature value {X[r, c]!r} at row {int(r)}, "
            f"column {dataset.feature_names[int(c)]!r}; chi-squared scoring "
            "requires non-negative features"
        )
    n = dataset.n_samples
    totals = X.sum(axis=0)
    nonzero = totals > 0.0
    scores = np.zeros(dataset.n_features, dtype=np.float64)
    for c, n_c in enumerate(dataset.class_counts()):
        if n_c == 0:
            continue
        observed = X[dataset.labels == c].sum(axis=0)
        expected = (n_c / n) * totals
        diff = observed[nonzero] - expected[nonzero]
        scores[nonzero] += diff * diff / expected[nonzero]
    return ChiSquareScores(scores)


def select_k_best(scores: ChiSquareScores, k: int) -> FeatureMask:
    """Indices of the k largest scores, ties broken toward the lower index."""
    m = scores.scores.size
    if not 1 <= k <= m:
        raise ConfigError(f"k must lie in [1, {m}], got {k}")
    # stable sort on the negated scores keeps equal scores in index order
    order = np.argsort(-scores.scores, kind="stable")
    return FeatureMask(np.sort(order[:k]))


def apply_mask(dataset: Dataset, mask: FeatureMask) -> Dataset:
    """Restrict the dataset's columns to the mask, labels unchanged."""
    sel = mask.selected
    if sel.size and (sel.min() < 0 or sel.max() >= dataset.n_features):
        raise ConfigError(
            f"mask index out of range for {dataset.n_features} features"
        )
    names = tuple(dataset.feature_names[j] for j in sel)
    return Dataset(dataset.features[:, sel], dataset.labels, dataset.label_names, names)


def write_scores_csv(scores: ChiSquareScores, feature_names, path) -> None:
    """Export scores as ``feature,score`` rows ordered by feature index."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("feature,score\n")
        for name, s in zip(feature_names, scores.scores.tolist()):
            fh.write(f"{name},{s!r}\n")
