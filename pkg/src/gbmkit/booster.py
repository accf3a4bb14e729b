"""Boosted-ensemble training for binary-logistic and softmax objectives.

Each iteration computes per-instance gradients and hessians from the
current raw scores, draws a one-side sample, grows one tree per class
tree (one for binary, one per class for softmax), shrinks its leaves by
the learning rate, and adds its outputs to the raw scores. Training is
deterministic for a fixed (data, params, seed) triple and independent of
the worker count: sampling happens on the calling thread, and all
parallel reductions merge in fixed feature/class order.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import numpy as np

from .binning import bin_features
from .dataset import Dataset
from .efb import BoostingDesign, efb_bundle, singleton_bundles
from .errors import ConfigError, DataError, ModelFormatError
from .goss import GossConfig, goss_sample
from .tree import Tree, grow_tree

OBJECTIVES = ("binary_logistic", "multiclass_softmax")

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class BoosterParams:
    """Training hyperparameters. The defaults are the reference settings
    used throughout the experiment scripts."""

    learning_rate: float = 0.24
    num_iterations: int = 250
    max_leaves: int = 105
    max_depth: int = 7
    min_data_in_leaf: int = 40
    goss: GossConfig = field(default_factory=GossConfig)
    max_bins: int = 255
    efb_enabled: bool = True
    efb_max_conflict: int = 0
    seed: int = 0
    objective: str = "binary_logistic"

    def __post_init__(self) -> None:
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.num_iterations < 1:
            raise ConfigError(f"num_iterations must be >= 1, got {self.num_iterations}")
        if self.max_leaves < 2:
            raise ConfigError(f"max_leaves must be >= 2, got {self.max_leaves}")
        if self.max_depth < 1:
            raise ConfigError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.min_data_in_leaf < 1:
            raise ConfigError(f"min_data_in_leaf must be >= 1, got {self.min_data_in_leaf}")
        if not 2 <= self.max_bins <= 256:
            raise ConfigError(f"max_bins must lie in [2, 256], got {self.max_bins}")
        if self.efb_max_conflict < 0:
            raise ConfigError(f"efb_max_conflict must be >= 0, got {self.efb_max_conflict}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "num_iterations": self.num_iterations,
            "max_leaves": self.max_leaves,
            "max_depth": self.max_depth,
            "min_data_in_leaf": self.min_data_in_leaf,
            "goss_top_rate": self.goss.top_rate,
            "goss_other_rate": self.goss.other_rate,
            "max_bins": self.max_bins,
            "efb_enabled": self.efb_enabled,
            "efb_max_conflict": self.efb_max_conflict,
            "seed": self.seed,
            "objective": self.objective,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BoosterParams":
        doc = dict(doc)
        goss = GossConfig(doc.pop("goss_top_rate", 0.2), doc.pop("goss_other_rate", 0.1))
        return cls(goss=goss, **doc)


@dataclass
class BoosterModel:
    """A trained ensemble: per-class prior scores plus ordered trees."""

    objective: str
    label_names: tuple[str, ...]
    base_scores: np.ndarray
    trees: list[Tree]
    feature_count: int
    params_echo: dict = field(default_factory=dict)

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    @property
    def trees_per_iteration(self) -> int:
        return 1 if self.objective == "binary_logistic" else self.n_classes


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _softmax(raw: np.ndarray) -> np.ndarray:
    shifted = raw - raw.max(axis=1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=1, keepdims=True)


def binary_logloss(raw: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-instance negative log-likelihood at raw score ``raw``."""
    return np.logaddexp(0.0, raw) - y * raw


def binary_grad_hess(raw: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = _sigmoid(raw)
    return p - y, p * (1.0 - p)


def softmax_grad_hess(raw: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = _softmax(raw)
    grad = p.copy()
    grad[np.arange(labels.size), labels] -= 1.0
    return grad, p * (1.0 - p)


def train(dataset: Dataset, params: BoosterParams, n_threads: int = 1) -> BoosterModel:
    """Fit a boosted ensemble on a dataset.

    Binning, bundling, and the class priors come from the training data
    alone; GOSS sampling consumes one seeded generator sequentially over
    iterations (and classes, for softmax).
    """
    counts = dataset.class_counts()
    if len(dataset.label_names) < 2 or np.count_nonzero(counts) < 2:
        raise DataError("training requires at least two populated classes")
    if (counts == 0).any():
        empty = dataset.label_names[int(np.flatnonzero(counts == 0)[0])]
        raise DataError(f"class {empty!r} has no samples")
    if params.objective == "binary_logistic" and len(dataset.label_names) != 2:
        raise ConfigError(
            f"binary objective requires exactly 2 classes, got {len(dataset.label_names)}"
        )

    binned = bin_features(dataset, params.max_bins)
    bundles = (
        efb_bundle(binned, params.efb_max_conflict)
        if params.efb_enabled
        else singleton_bundles(binned)
    )
    design = BoostingDesign(binned, bundles)
    rng = np.random.default_rng(params.seed)
    n = dataset.n_samples
    trees: list[Tree] = []

    if params.objective == "binary_logistic":
        y = (dataset.labels == 1).astype(np.float64)
        n0, n1 = int(counts[0]), int(counts[1])
        base_scores = np.array([math.log(n0 / n1), math.log(n1 / n0)])
        raw = np.full(n, base_scores[1])
        for _ in range(params.num_iterations):
            g, h = binary_grad_hess(raw, y)
            sample = goss_sample(g, params.goss, rng)
            tree = grow_tree(design, g, h, sample, params, n_threads)
            tree.scale(params.learning_rate)
            raw = raw + tree.predict_from_design(design)
            trees.append(tree)
    else:
        k = len(dataset.label_names)
        base_scores = np.log(counts / n)
        raw = np.tile(base_scores, (n, 1))
        for _ in range(params.num_iterations):
            grads, hess = softmax_grad_hess(raw, dataset.labels)
            samples = [goss_sample(grads[:, c], params.goss, rng) for c in range(k)]

            def grow_class(c: int) -> Tree:
                return grow_tree(design, grads[:, c], hess[:, c], samples[c], params)

            if n_threads > 1:
                with ThreadPoolExecutor(max_workers=min(n_threads, k)) as pool:
                    grown = list(pool.map(grow_class, range(k)))
            else:
                grown = [grow_class(c) for c in range(k)]
            for c, tree in enumerate(grown):
                tree.scale(params.learning_rate)
                raw[:, c] += tree.predict_from_design(design)
                trees.append(tree)

    return BoosterModel(
        objective=params.objective,
        label_names=dataset.label_names,
        base_scores=base_scores,
        trees=trees,
        feature_count=dataset.n_features,
        params_echo=params.to_dict(),
    )


def predict(model: BoosterModel, features) -> np.ndarray:
    """Per-class probability matrix for a raw feature matrix."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.feature_count:
        raise DataError(
            f"feature count mismatch: model expects {model.feature_count} columns, "
            f"got shape {X.shape}"
        )
    n = X.shape[0]
    if model.objective == "binary_logistic":
        raw = np.full(n, float(model.base_scores[1]))
        for tree in model.trees:
            raw += tree.predict_raw(X)
        p1 = _sigmoid(raw)
        return np.column_stack([1.0 - p1, p1])
    k = model.n_classes
    raw = np.tile(np.asarray(model.base_scores, dtype=np.float64), (n, 1))
    for i, tree in enumerate(model.trees):
        raw[:, i % k] += tree.predict_raw(X)
    return _softmax(raw)


def predict_labels(model: BoosterModel, features) -> np.ndarray:
    """Argmax class index per row; ties go to the lower class index."""
    return np.argmax(predict(model, features), axis=1)


def save_model(model: BoosterModel, path) -> None:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "objective": model.objective,
        "label_names": list(model.label_names),
        "base_scores": [float(v) for v in model.base_scores],
        "feature_count": model.feature_count,
        "params_echo": model.params_echo,
        "trees": [tree.to_dict() for tree in model.trees],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")


def load_model(path) -> BoosterModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"{path}: malformed model document: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: model document must be a JSON object")
    for key in ("format_version", "objective", "label_names", "base_scores", "feature_count", "trees"):
        if key not in doc:
            raise ModelFormatError(f"{path}: model document missing {key!r}")
    if doc["format_version"] != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported format_version {doc['format_version']!r}"
        )
    if doc["objective"] not in OBJECTIVES:
        raise ModelFormatError(f"{path}: unknown objective {doc['objective']!r}")
    label_names = tuple(str(s) for s in doc["label_names"])
    base_scores = np.asarray([float(v) for v in doc["base_scores"]], dtype=np.float64)
    if base_scores.size != len(label_names):
        raise ModelFormatError(f"{path}: base_scores length does not match label_names")
    feature_count = int(doc["feature_count"])
    trees = [Tree.from_dict(t) for t in doc["trees"]]
    for tree in trees:
        if any(f >= feature_count or f < 0 for f in tree.features):
            raise ModelFormatError(f"{path}: tree references feature out of range")
    return BoosterModel(
        objective=doc["objective"],
        label_names=label_names,
        base_scores=base_scores,
        trees=trees,
        feature_count=feature_count,
        params_echo=doc.get("params_echo", {}),
    )


def params_with_seed(params: BoosterParams, seed: int) -> BoosterParams:
    return replace(params, seed=seed)
