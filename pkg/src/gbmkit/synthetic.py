"""Synthetic feature matrices for experiments and tests."""
from __future__ import annotations

import numpy as np

from .dataset import Dataset


def two_gaussian_dataset(
    n_per_class: tuple[int, int] = (125, 500),
    n_features: int = 100,
    n_informative: int = 10,
    shift: float = 0.4,
    noise: float = 0.3,
    seed: int = 0,
    label_names: tuple[str, str] = ("case", "control"),
) -> Dataset:
    """Imbalanced two-class data: informative columns differ by ``shift``
    in the mean, values clipped at 0 so chi-squared scoring applies."""
    rng = np.random.default_rng(seed)
    blocks = []
    for c, n_c in enumerate(n_per_class):
        means = np.full(n_features, 1.0)
        means[:n_informative] = 1.0 + shift if c == 0 else 1.0 - shift
        blocks.append(rng.normal(means, noise, size=(n_c, n_features)))
    features = np.clip(np.vstack(blocks), 0.0, None)
    labels = np.repeat(np.arange(len(n_per_class)), n_per_class)
    return Dataset.from_arrays(features, labels, label_names)


def grouped_onehot_dataset(
    n_rows: int = 200,
    n_groups: int = 5,
    group_size: int = 10,
    seed: int = 0,
) -> Dataset:
    """Sparse data built from groups of mutually exclusive indicator
    features: every row activates exactly one column per group, so each
    column is non-zero on roughly 1/group_size of the rows. The label
    follows the active column of the first group."""
    rng = np.random.default_rng(seed)
    m = n_groups * group_size
    features = np.zeros((n_rows, m))
    choices = rng.integers(0, group_size, size=(n_rows, n_groups))
    values = rng.uniform(0.5, 2.0, size=(n_rows, n_groups))
    for g in range(n_groups):
        features[np.arange(n_rows), g * group_size + choices[:, g]] = values[:, g]
    labels = (choices[:, 0] >= group_size // 2).astype(np.int64)
    return Dataset.from_arrays(features, labels, ("low", "high"))
