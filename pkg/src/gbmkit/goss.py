"""Gradient-based one-side sampling and the split gain it feeds.

Sampling keeps every instance whose gradient magnitude lands in the top
``top_rate`` fraction (set A) and draws a uniform ``other_rate`` fraction
of the remainder without replacement (set B). Gradient sums over B are
amplified by (1 - top_rate) / other_rate so that split gains estimated on
the sample stay unbiased for the full data.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GossConfig:
    """Sampling rates: ``top_rate`` kept by gradient rank, ``other_rate``
    drawn at random from the rest."""

    top_rate: float = 0.2
    other_rate: float = 0.1

    def __post_init__(self) -> None:
        a, b = self.top_rate, self.other_rate
        if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
            raise ConfigError(f"sampling rates must lie in [0, 1], got a={a}, b={b}")
        if a + b > 1.0:
            raise ConfigError(f"top_rate + other_rate must be <= 1, got {a + b}")
        if a < 1.0 and b <= 0.0:
            raise ConfigError("other_rate must be positive when top_rate < 1")

    @property
    def amplification(self) -> float:
        """Weight applied to sampled small-gradient instances."""
        return (1.0 - self.top_rate) / self.other_rate if self.other_rate > 0 else 1.0


@dataclass
class GossSample:
    """One iteration's sampled instance sets."""

    set_a: np.ndarray
    set_b: np.ndarray
    weight: float

    @property
    def n_sampled(self) -> int:
        return self.set_a.size + self.set_b.size


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def goss_sample(gradients, config: GossConfig, rng: np.random.Generator) -> GossSample:
    """Draw the kept and sampled index sets for one boosting iteration.

    ``set_a`` holds the round(a*n) largest-magnitude gradients (ties
    broken toward the lower index); ``set_b`` is drawn uniformly without
    replacement from the rest. Both come back sorted ascending.
    """
    g = np.asarray(gradients, dtype=np.float64)
    n = g.size
    if n < 1:
        raise ConfigError("need at least one gradient to sample")
    top_n = min(_round_half_up(config.top_rate * n), n)
    order = np.argsort(-np.abs(g), kind="stable")
    set_a = np.sort(order[:top_n]).astype(np.int64)
    remainder = np.sort(order[top_n:]).astype(np.int64)
    rand_n = _round_half_up(config.other_rate * n)
    if rand_n > remainder.size:
        logger.warning(
            "one-side sample truncated: requested %d of %d remaining rows",
            rand_n,
            remainder.size,
        )
        rand_n = remainder.size
    if rand_n > 0:
        set_b = np.sort(rng.choice(remainder, size=rand_n, replace=False))
        weight = config.amplification
    else:
        set_b = np.empty(0, dtype=np.int64)
        weight = 1.0
    return GossSample(set_a=set_a, set_b=set_b.astype(np.int64), weight=float(weight))


@dataclass
class SplitPartition:
    """Index sets of a candidate split: the kept set A and sampled set B,
    each partitioned by the threshold."""

    a_left: np.ndarray
    a_right: np.ndarray
    b_left: np.ndarray
    b_right: np.ndarray

    def __post_init__(self) -> None:
        self.a_left = np.asarray(self.a_left, dtype=np.int64)
        self.a_right = np.asarray(self.a_right, dtype=np.int64)
        self.b_left = np.asarray(self.b_left, dtype=np.int64)
        self.b_right = np.asarray(self.b_right, dtype=np.int64)

    @property
    def n_left(self) -> int:
        return self.a_left.size + self.b_left.size

    @property
    def n_right(self) -> int:
        return self.a_right.size + self.b_right.size


def variance_gain(partition: SplitPartition, gradients, config: GossConfig, n: int) -> float:
    """Split score of a candidate threshold on sampled data.

    Per side, the squared sum of gradients (B-side sums amplified by
    (1-a)/b) is divided by the side's sampled instance count; the two
    terms are summed and scaled by 1/n.
    """
    if n < 1:
        raise ConfigError(f"instance count must be >= 1, got {n}")
    if partition.n_left < 1 or partition.n_right < 1:
        raise ConfigError("both sides of a split must be non-empty")
    g = np.asarray(gradients, dtype=np.float64)
    weight = config.amplification if (partition.b_left.size + partition.b_right.size) else 1.0
    left = g[partition.a_left].sum() + weight * g[partition.b_left].sum()
    right = g[partition.a_right].sum() + weight * g[partition.b_right].sum()
    return (left * left / partition.n_left + right * right / partition.n_right) / n
