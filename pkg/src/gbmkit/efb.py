"""Exclusive feature bundling: pack rarely-overlapping sparse features
into shared histogram columns.

A bundle encodes its members into one integer code per row. Code 0 means
"every member sits at its default bin" (the bin holding raw value 0.0);
member i's non-default bins occupy the contiguous code range
[offset_i, offset_i + n_bins_i - 2]. With a conflict budget of 0 the
encoding is bijective on the training rows; rows that collide under a
positive budget are attributed to the latest member in bundle order.

Split search never reads a member's default-bin statistics out of code 0
(several members share it). It recovers them by subtracting the member's
non-default totals from the node totals; the singleton path uses the same
subtraction so training with and without bundling is bit-identical.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .binning import BinnedMatrix
from .errors import ConfigError


@dataclass
class FeatureBundle:
    """Member feature indices and their code-range offsets."""

    members: tuple[int, ...]
    offsets: tuple[int, ...]
    n_codes: int


def efb_bundle(binned: BinnedMatrix, max_conflict: int) -> list[FeatureBundle]:
    """Greedy bundling ordered by descending non-default count.

    A feature joins the first bundle whose accumulated conflict count
    (rows where the feature and the bundle are both non-default) stays
    within ``max_conflict``, otherwise it opens a new bundle.
    """
    if max_conflict < 0:
        raise ConfigError(f"max_conflict must be >= 0, got {max_conflict}")
    n, m = binned.n_rows, binned.n_features
    defaults = np.array([f.default_bin for f in binned.features], dtype=np.int32)
    nondefault = binned.bins != defaults[None, :]
    counts = nondefault.sum(axis=0)
    order = sorted(range(m), key=lambda f: (-int(counts[f]), f))

    members: list[list[int]] = []
    unions: list[np.ndarray] = []
    union_counts: list[int] = []
    conflicts: list[int] = []
    for f in order:
        col = nondefault[:, f]
        cnt = int(counts[f])
        placed = False
        for bi in range(len(members)):
            budget = max_conflict - conflicts[bi]
            # pigeonhole lower bound on the overlap, cheap to test
            if union_counts[bi] + cnt - n > budget:
                continue
            overlap = int(np.count_nonzero(unions[bi] & col))
            if overlap <= budget:
                members[bi].append(f)
                unions[bi] |= col
                union_counts[bi] += cnt - overlap
                conflicts[bi] += overlap
                placed = True
                break
        if not placed:
            members.append([f])
            unions.append(col.copy())
            union_counts.append(cnt)
            conflicts.append(0)
    return [_finish_bundle(binned, mem) for mem in members]


def singleton_bundles(binned: BinnedMatrix) -> list[FeatureBundle]:
    """One bundle per feature, in feature order (bundling disabled)."""
    return [_finish_bundle(binned, [f]) for f in range(binned.n_features)]


def _finish_bundle(binned: BinnedMatrix, member_list: list[int]) -> FeatureBundle:
    offsets = []
    base = 1
    for f in member_list:
        offsets.append(base)
        base += binned.features[f].n_bins - 1
    return FeatureBundle(tuple(member_list), tuple(offsets), base)


class BoostingDesign:
    """Bundled, binned training design with a flat histogram layout.

    ``codes`` holds one int32 column per bundle; ``slot_offsets`` maps a
    bundle's codes into one shared histogram vector of ``total_slots``
    entries, so a node's statistics for every feature come from a single
    bincount pass over the node's rows.
    """

    def __init__(self, binned: BinnedMatrix, bundles: list[FeatureBundle]):
        self.binned = binned
        self.bundles = bundles
        n = binned.n_rows
        self.codes = np.zeros((n, len(bundles)), dtype=np.int32)
        self.slot_offsets = np.zeros(len(bundles), dtype=np.int64)
        self.feature_loc: dict[int, tuple[int, int]] = {}
        total = 0
        for j, bundle in enumerate(bundles):
            self.slot_offsets[j] = total
            total += bundle.n_codes
            for pos, f in enumerate(bundle.members):
                self.feature_loc[f] = (j, pos)
                feat = binned.features[f]
                bins = binned.bins[:, f]
                nd = bins != feat.default_bin
                enc = bundle.offsets[pos] + np.where(bins < feat.default_bin, bins, bins - 1)
                self.codes[nd, j] = enc[nd].astype(np.int32)
        self.total_slots = total

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def n_bundles(self) -> int:
        return len(self.bundles)

    @property
    def n_features(self) -> int:
        return self.binned.n_features

    def member_slots(self, feature: int) -> tuple[int, int, int]:
        """(first histogram slot, n_bins, default_bin) for a feature."""
        j, pos = self.feature_loc[feature]
        start = int(self.slot_offsets[j]) + self.bundles[j].offsets[pos]
        feat = self.binned.features[feature]
        return start, feat.n_bins, feat.default_bin

    def feature_bins(self, feature: int, rows: np.ndarray) -> np.ndarray:
        """Decode a feature's bin indices for the given rows."""
        j, pos = self.feature_loc[feature]
        bundle = self.bundles[j]
        feat = self.binned.features[feature]
        off = bundle.offsets[pos]
        rel = self.codes[rows, j] - off
        in_range = (rel >= 0) & (rel <= feat.n_bins - 2)
        decoded = np.where(rel < feat.default_bin, rel, rel + 1)
        return np.where(in_range, decoded, feat.default_bin).astype(np.int32)

    def node_histograms(
        self, rows: np.ndarray, weights: np.ndarray, n_threads: int = 1
    ) -> tuple[np.ndarray, np.ndarray]:
        """Per-slot instance counts and weighted-gradient sums over ``rows``.

        Accumulation is per-slot in ascending row order, and bundle chunks
        write disjoint slot ranges, so the result is independent of the
        worker count.
        """
        w = weights[rows]
        chunks = self._chunk_ranges(n_threads)
        counts = np.empty(self.total_slots, dtype=np.int64)
        sums = np.empty(self.total_slots, dtype=np.float64)

        def fill(span: tuple[int, int]) -> None:
            j0, j1 = span
            s0 = int(self.slot_offsets[j0])
            s1 = int(self.slot_offsets[j1 - 1]) + self.bundles[j1 - 1].n_codes
            local = (self.codes[np.ix_(rows, np.arange(j0, j1))] + (self.slot_offsets[j0:j1] - s0)).ravel()
            counts[s0:s1] = np.bincount(local, minlength=s1 - s0)
            sums[s0:s1] = np.bincount(local, weights=np.repeat(w, j1 - j0), minlength=s1 - s0)

        if len(chunks) == 1:
            fill(chunks[0])
        else:
            with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
                list(pool.map(fill, chunks))
        return counts, sums

    def _chunk_ranges(self, n_threads: int) -> list[tuple[int, int]]:
        nb = self.n_bundles
        n_chunks = max(1, min(n_threads, nb))
        edges = [(i * nb) // n_chunks for i in range(n_chunks + 1)]
        return [(edges[i], edges[i + 1]) for i in range(n_chunks) if edges[i] < edges[i + 1]]
