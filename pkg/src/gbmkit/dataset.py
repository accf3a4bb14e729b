"""Labeled feature matrices: CSV I/O, validation, stratified splitting.

The interchange format is a UTF-8 CSV with LF line endings. The header's
first cell is ``label``; the remaining cells name the feature columns.
Each data row is a class-label string followed by the row's feature
values. Distinct labels are mapped to integer indices in order of first
appearance, so the caller controls class order through row order (put
the class of interest first). Feature values are written with ``repr``
so a save/load round trip is bit-identical.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, StratificationError


@dataclass
class Dataset:
    """An in-memory feature matrix with one class label per row."""

    features: np.ndarray
    labels: np.ndarray
    label_names: tuple[str, ...]
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.label_names = tuple(self.label_names)
        self.feature_names = tuple(self.feature_names)
        if self.features.ndim != 2:
            raise DataError("feature matrix must be 2-dimensional")
        n, m = self.features.shape
        if n < 1 or m < 1:
            raise DataError("feature matrix needs at least one row and one column")
        if self.labels.shape != (n,):
            raise DataError(f"expected {n} labels, got shape {self.labels.shape}")
        if len(set(self.label_names)) != len(self.label_names):
            raise DataError("duplicate label names")
        if len(self.feature_names) != m:
            raise DataError(f"expected {m} feature names, got {len(self.feature_names)}")
        if self.labels.min() < 0 or self.labels.max() >= len(self.label_names):
            raise DataError("label index out of range")
        if not np.isfinite(self.features).all():
            r, c = np.argwhere(~np.isfinite(self.features))[0]
            raise DataError(f"non-finite feature value at row {int(r)}, column {int(c)}")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=len(self.label_names))

    @classmethod
    def from_arrays(cls, features, labels, label_names, feature_names=None) -> "Dataset":
        features = np.asarray(features, dtype=np.float64)
        if feature_names is None:
            feature_names = tuple(f"f{j}" for j in range(features.shape[1]))
        return cls(features, np.asarray(labels), tuple(label_names), tuple(feature_names))


def load_feature_csv(path) -> Dataset:
    """Parse a feature CSV (see the module docstring for the format).

    Raises DataError naming the offending line for ragged rows,
    non-numeric cells, and non-finite values.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        if not header or header[0] != "label":
            raise DataError(f"{path}: first header cell must be 'label'")
        feature_names = tuple(header[1:])
        if not feature_names:
            raise DataError(f"{path}: header declares no feature columns")
        m = len(feature_names)
        label_to_index: dict[str, int] = {}
        labels: list[int] = []
        rows: list[list[float]] = []
        for lineno, cells in enumerate(reader, start=2):
            if len(cells) != m + 1:
                raise DataError(
                    f"{path}: line {lineno}: expected {m + 1} cells, got {len(cells)}"
                )
            idx = label_to_index.setdefault(cells[0], len(label_to_index))
            labels.append(idx)
            try:
                rows.append([float(c) for c in cells[1:]])
            except ValueError:
                bad = next(j for j, c in enumerate(cells[1:]) if not _is_float(c))
                raise DataError(
                    f"{path}: line {lineno}: non-numeric value {cells[1 + bad]!r} "
                    f"in column {feature_names[bad]!r}"
                ) from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    features = np.array(rows, dtype=np.float64)
    if not np.isfinite(features).all():
        r, c = np.argwhere(~np.isfinite(features))[0]
        raise DataError(
            f"{path}: line {int(r) + 2}: non-finite value in column {feature_names[int(c)]!r}"
        )
    label_names = tuple(label_to_index)
    return Dataset(features, np.array(labels, dtype=np.int64), label_names, feature_names)


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def save_feature_csv(dataset: Dataset, path) -> None:
    """Write ``dataset`` so that loading it back is value-identical."""
    for name in dataset.label_names + dataset.feature_names:
        if "," in name or "\n" in name or "\r" in name:
            raise DataError(f"name {name!r} contains a CSV delimiter")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("label," + ",".join(dataset.feature_names) + "\n")
        for i in range(dataset.n_samples):
            cells = [dataset.label_names[dataset.labels[i]]]
            cells.extend(repr(v) for v in dataset.features[i].tolist())
            fh.write(",".join(cells) + "\n")


def take_rows(dataset: Dataset, indices) -> Dataset:
    idx = np.asarray(indices, dtype=np.int64)
    return Dataset(
        dataset.features[idx], dataset.labels[idx], dataset.label_names, dataset.feature_names
    )


@dataclass
class FoldSplit:
    """One train/test partition of the row indices."""

    fold_id: int
    train_indices: np.ndarray
    test_indices: np.ndarray


def stratified_kfold(dataset: Dataset, k: int, seed: int) -> list[FoldSplit]:
    """Deterministic stratified folds.

    Per class, rows are shuffled with a seeded generator and dealt
    round-robin into the k test bins, so each fold's per-class test
    count is within one of exact proportionality.
    """
    if k < 2:
        raise ConfigError(f"fold count must be >= 2, got {k}")
    counts = dataset.class_counts()
    for c, cnt in enumerate(counts):
        if cnt < k:
            raise StratificationError(
                f"class {dataset.label_names[c]!r} has {int(cnt)} samples, fewer than k={k}"
            )
    rng = np.random.default_rng(seed)
    test_bins: list[list[int]] = [[] for _ in range(k)]
    for c in range(len(counts)):
        shuffled = rng.permutation(np.flatnonzero(dataset.labels == c))
        for j, row in enumerate(shuffled):
            test_bins[j % k].append(int(row))
    n = dataset.n_samples
    folds = []
    for i in range(k):
        test = np.sort(np.array(test_bins[i], dtype=np.int64))
        mask = np.ones(n, dtype=bool)
        mask[test] = False
        folds.append(FoldSplit(i, np.flatnonzero(mask).astype(np.int64), test))
    return folds


def stratified_holdout(dataset: Dataset, test_fraction: float, seed: int) -> FoldSplit:
    """Single stratified train/test split with round-half-up per-class test counts."""
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"holdout fraction must lie in (0, 1), got {test_fraction}")
    counts = dataset.class_counts()
    rng = np.random.default_rng(seed)
    test_rows: list[int] = []
    for c, cnt in enumerate(counts):
        if cnt < 2:
            raise StratificationError(
                f"class {dataset.label_names[c]!r} has {int(cnt)} samples; need >= 2 to hold out"
            )
        n_test = int(np.floor(test_fraction * cnt + 0.5))
        n_test = min(max(n_test, 1), int(cnt) - 1)
        shuffled = rng.permutation(np.flatnonzero(dataset.labels == c))
        test_rows.extend(int(r) for r in shuffled[:n_test])
    test = np.sort(np.array(test_rows, dtype=np.int64))
    mask = np.ones(dataset.n_samples, dtype=bool)
    mask[test] = False
    return FoldSplit(0, np.flatnonzero(mask).astype(np.int64), test)
