"""Leaf-wise tree growth over a bundled, binned design.

Growth is best-first: a heap keyed on split improvement always expands
the leaf whose best candidate gains most, until the leaf or depth budget
runs out. Candidate scores follow the one-side-sampling variance formula
(squared weighted-gradient sums over per-side sampled counts), compared
as improvement over the unsplit leaf so uninformative splits never win;
dropping the constant 1/n scale and subtracting the parent term leaves
the argmax unchanged. Ties go to the lower feature index, then the lower
threshold. Leaf outputs are Newton steps -sum(g) / (sum(h) + reg) over
the weighted sampled instances.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

import numpy as np

from .efb import BoostingDesign
from .errors import ModelFormatError
from .goss import GossSample

if TYPE_CHECKING:  # pragma: no cover
    from .booster import BoosterParams

LEAF_REG = 1e-3


@dataclass
class Tree:
    """A grown decision tree.

    Internal nodes route ``x[feature] <= threshold`` to the left child.
    Child references >= 0 index ``nodes``; negative references encode
    leaf ``-(ref + 1)``. ``bin_cuts`` mirrors ``thresholds`` in bin space
    and only exists on freshly grown trees (it is not serialized).
    """

    features: list[int] = field(default_factory=list)
    thresholds: list[float] = field(default_factory=list)
    lefts: list[int] = field(default_factory=list)
    rights: list[int] = field(default_factory=list)
    leaf_values: list[float] = field(default_factory=list)
    bin_cuts: Optional[list[int]] = None

    @property
    def n_leaves(self) -> int:
        return len(self.leaf_values)

    @property
    def n_nodes(self) -> int:
        return len(self.features)

    def depth(self) -> int:
        if not self.features:
            return 0
        depths = {0: 0}
        best = 0
        for i in range(len(self.features)):
            d = depths[i] + 1
            for ref in (self.lefts[i], self.rights[i]):
                if ref >= 0:
                    depths[ref] = d
                else:
                    best = max(best, d)
        return best

    def scale(self, factor: float) -> None:
        self.leaf_values = [v * factor for v in self.leaf_values]

    def predict_raw(self, X: np.ndarray) -> np.ndarray:
        """Leaf value per row of a raw feature matrix."""
        out = np.empty(X.shape[0], dtype=np.float64)
        if not self.features:
            out.fill(self.leaf_values[0])
            return out
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            ref, idx = stack.pop()
            if ref < 0:
                out[idx] = self.leaf_values[-ref - 1]
                continue
            go_left = X[idx, self.features[ref]] <= self.thresholds[ref]
            stack.append((self.lefts[ref], idx[go_left]))
            stack.append((self.rights[ref], idx[~go_left]))
        return out

    def predict_from_design(self, design: BoostingDesign) -> np.ndarray:
        """Leaf value per training row, routed through bin space."""
        out = np.empty(design.n_rows, dtype=np.float64)
        if not self.features:
            out.fill(self.leaf_values[0])
            return out
        stack = [(0, np.arange(design.n_rows))]
        while stack:
            ref, idx = stack.pop()
            if ref < 0:
                out[idx] = self.leaf_values[-ref - 1]
                continue
            go_left = design.feature_bins(self.features[ref], idx) <= self.bin_cuts[ref]
            stack.append((self.lefts[ref], idx[go_left]))
            stack.append((self.rights[ref], idx[~go_left]))
        return out

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "feature": self.features[i],
                    "threshold": self.thresholds[i],
                    "left": self.lefts[i],
                    "right": self.rights[i],
                }
                for i in range(len(self.features))
            ],
            "leaf_values": list(self.leaf_values),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Tree":
        try:
            nodes = doc["nodes"]
            leaf_values = [float(v) for v in doc["leaf_values"]]
        except (KeyError, TypeError) as exc:
            raise ModelFormatError(f"tree document missing field: {exc}") from None
        features, thresholds, lefts, rights = [], [], [], []
        for node in nodes:
            try:
                features.append(int(node["feature"]))
                thresholds.append(float(node["threshold"]))
                lefts.append(int(node["left"]))
                rights.append(int(node["right"]))
            except (KeyError, TypeError) as exc:
                raise ModelFormatError(f"tree node missing field: {exc}") from None
        tree = cls(features, thresholds, lefts, rights, leaf_values)
        tree._validate()
        return tree

    def _validate(self) -> None:
        k, nl = len(self.features), len(self.leaf_values)
        if k == 0:
            if nl != 1:
                raise ModelFormatError("a split-free tree must have exactly one leaf")
            return
        if nl != k + 1:
            raise ModelFormatError(f"tree with {k} nodes must have {k + 1} leaves, got {nl}")
        seen_nodes: set[int] = set()
        seen_leaves: set[int] = set()
        for i in range(k):
            for ref in (self.lefts[i], self.rights[i]):
                if ref >= 0:
                    if ref <= i or ref >= k or ref in seen_nodes:
                        raise ModelFormatError(f"invalid child node reference {ref}")
                    seen_nodes.add(ref)
                else:
                    leaf = -ref - 1
                    if leaf >= nl or leaf in seen_leaves:
                        raise ModelFormatError(f"invalid leaf reference {ref}")
                    seen_leaves.add(leaf)
        if len(seen_nodes) != k - 1 or len(seen_leaves) != nl:
            raise ModelFormatError("tree children do not form a proper binary tree")


class _GrowNode:
    __slots__ = ("rows", "depth", "count", "sum_wg", "sum_wh", "best", "split", "left", "right")

    def __init__(self, rows: np.ndarray, depth: int, wg: np.ndarray, wh: np.ndarray):
        self.rows = rows
        self.depth = depth
        self.count = rows.size
        self.sum_wg = float(wg[rows].sum())
        self.sum_wh = float(wh[rows].sum())
        self.best: Optional[tuple[float, int, int]] = None
        self.split: Optional[tuple[int, int]] = None
        self.left: Optional["_GrowNode"] = None
        self.right: Optional["_GrowNode"] = None

    def leaf_value(self) -> float:
        return -self.sum_wg / (self.sum_wh + LEAF_REG)


def grow_tree(
    design: BoostingDesign,
    gradients: np.ndarray,
    hessians: np.ndarray,
    sample: GossSample,
    params: "BoosterParams",
    n_threads: int = 1,
) -> Tree:
    """Grow one tree on the sampled instances. Leaf values are unscaled
    Newton steps; the caller applies learning-rate shrinkage."""
    n = design.n_rows
    wg = np.zeros(n, dtype=np.float64)
    wh = np.zeros(n, dtype=np.float64)
    wg[sample.set_a] = gradients[sample.set_a]
    wh[sample.set_a] = hessians[sample.set_a]
    if sample.set_b.size:
        wg[sample.set_b] = gradients[sample.set_b] * sample.weight
        wh[sample.set_b] = hessians[sample.set_b] * sample.weight
    rows = np.sort(np.concatenate([sample.set_a, sample.set_b]))

    root = _GrowNode(rows, 0, wg, wh)
    heap: list[tuple[float, int, _GrowNode]] = []
    counter = 0

    def consider(node: _GrowNode) -> None:
        nonlocal counter
        if (
            node.depth < params.max_depth
            and node.count >= 2 * params.min_data_in_leaf
            and node.count >= 2
        ):
            node.best = _best_split(
                design, node.rows, node.count, node.sum_wg, wg, params.min_data_in_leaf, n_threads
            )
        if node.best is not None:
            heapq.heappush(heap, (-node.best[0], counter, node))
            counter += 1

    consider(root)
    n_leaves = 1
    while heap and n_leaves < params.max_leaves:
        _, _, node = heapq.heappop(heap)
        _, feature, cut = node.best
        bins = design.feature_bins(feature, node.rows)
        go_left = bins <= cut
        node.split = (feature, cut)
        node.left = _GrowNode(node.rows[go_left], node.depth + 1, wg, wh)
        node.right = _GrowNode(node.rows[~go_left], node.depth + 1, wg, wh)
        n_leaves += 1
        consider(node.left)
        consider(node.right)

    return _assemble(root, design)


def _best_split(
    design: BoostingDesign,
    rows: np.ndarray,
    count: int,
    sum_wg: float,
    wg: np.ndarray,
    min_data: int,
    n_threads: int,
) -> Optional[tuple[float, int, int]]:
    """Best (improvement, feature, bin cut) over all histogram boundaries,
    or None when no candidate improves on the unsplit leaf."""
    counts_hist, wg_hist = design.node_histograms(rows, wg, n_threads)
    parent = sum_wg * sum_wg / count
    best: Optional[tuple[float, int, int]] = None
    for j, bundle in enumerate(design.bundles):
        for pos, f in enumerate(bundle.members):
            n_bins = design.binned.features[f].n_bins
            if n_bins < 2:
                continue
            d = design.binned.features[f].default_bin
            start = int(design.slot_offsets[j]) + bundle.offsets[pos]
            nd_cnt = counts_hist[start : start + n_bins - 1]
            nd_wg = wg_hist[start : start + n_bins - 1]
            # default-bin statistics by subtraction; code 0 is shared
            cnts = np.empty(n_bins, dtype=np.int64)
            cnts[:d] = nd_cnt[:d]
            cnts[d + 1 :] = nd_cnt[d:]
            cnts[d] = count - int(nd_cnt.sum())
            wgs = np.empty(n_bins, dtype=np.float64)
            wgs[:d] = nd_wg[:d]
            wgs[d + 1 :] = nd_wg[d:]
            wgs[d] = sum_wg - nd_wg.sum()

            cc = np.cumsum(cnts)[:-1]
            cw = np.cumsum(wgs)[:-1]
            valid = (cc >= min_data) & ((count - cc) >= min_data)
            if not valid.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                score = cw * cw / cc + (sum_wg - cw) * (sum_wg - cw) / (count - cc)
            imp = np.where(valid, score - parent, -np.inf)
            p = int(np.argmax(imp))
            v = float(imp[p])
            if v <= 0.0:
                continue
            if best is None or v > best[0] or (v == best[0] and (f, p) < (best[1], best[2])):
                best = (v, f, p)
    return best


def _assemble(root: _GrowNode, design: BoostingDesign) -> Tree:
    if root.split is None:
        return Tree(leaf_values=[root.leaf_value()], bin_cuts=[])
    features: list[int] = []
    thresholds: list[float] = []
    bin_cuts: list[int] = []
    lefts: list[int] = []
    rights: list[int] = []
    leaves: list[float] = []

    def walk(node: _GrowNode) -> int:
        if node.split is None:
            leaves.append(node.leaf_value())
            return -len(leaves)
        f, cut = node.split
        idx = len(features)
        features.append(f)
        bin_cuts.append(cut)
        thresholds.append(float(design.binned.features[f].cuts[cut]))
        lefts.append(0)
        rights.append(0)
        lefts[idx] = walk(node.left)
        rights[idx] = walk(node.right)
        return idx

    walk(root)
    return Tree(features, thresholds, lefts, rights, leaves, bin_cuts)
