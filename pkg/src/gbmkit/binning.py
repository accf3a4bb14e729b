"""Quantile binning of feature columns for histogram-based tree growth.

Bin boundaries are raw feature values chosen to spread a feature's
distinct values as evenly as possible over at most ``max_bins`` bins.
When a feature has no more distinct values than bins, every distinct
value gets its own bin, which makes histogram split search exhaustive
over raw thresholds. Assignment is a binary search against the
boundaries, so it is monotone in the raw value, and the construction
depends only on value order, never on scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class BinnedFeature:
    """Boundaries for one column. ``cuts[b]`` is the largest raw value in
    bin b; a row lands in the first bin whose cut is >= its value."""

    cuts: np.ndarray
    n_bins: int
    default_bin: int


@dataclass
class BinnedMatrix:
    """Per-cell bin indices plus the per-feature boundary metadata."""

    bins: np.ndarray
    features: list[BinnedFeature]

    @property
    def n_rows(self) -> int:
        return self.bins.shape[0]

    @property
    def n_features(self) -> int:
        return self.bins.shape[1]


def bin_features(dataset, max_bins: int) -> BinnedMatrix:
    """Bin every feature column of a dataset (or a raw matrix)."""
    if max_bins < 2:
        raise ConfigError(f"max_bins must be >= 2, got {max_bins}")
    X = getattr(dataset, "features", dataset)
    X = np.asarray(X, dtype=np.float64)
    n, m = X.shape
    bins = np.empty((n, m), dtype=np.int32)
    features = []
    for j in range(m):
        feat, col = _bin_column(X[:, j], max_bins)
        features.append(feat)
        bins[:, j] = col
    return BinnedMatrix(bins, features)


def _bin_column(values: np.ndarray, max_bins: int) -> tuple[BinnedFeature, np.ndarray]:
    distinct = np.unique(values)
    d = distinct.size
    if d <= max_bins:
        cuts = distinct[:-1].copy()
    else:
        # group ends at evenly spaced ranks over the distinct values
        edges = (np.arange(1, max_bins) * d) // max_bins
        cuts = distinct[edges - 1]
    col = np.searchsorted(cuts, values, side="left").astype(np.int32)
    default_bin = int(np.searchsorted(cuts, 0.0, side="left"))
    return BinnedFeature(cuts, cuts.size + 1, default_bin), col
