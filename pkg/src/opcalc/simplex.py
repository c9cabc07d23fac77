"""Ordered-simplex volumes: closed form, Monte Carlo, the n!-orderings
tiling of the cube, and the sliced evaluation of the Taylor remainder.

The region of the n-fold iterated integral is the order cell
{a <= t_n <= ... <= t_1 <= x}, one of n! congruent cells tiling the cube
[a, x]^n, so its volume is (x-a)^n/n!.  Monte Carlo estimates here sample
the unit cube with the counter-based generator from `rng`, which makes
every figure bit-reproducible from (seed, sample index) alone; samples
with duplicate coordinates (the measure-zero cell boundaries) are
discarded and counted, never tie-broken.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.stats import chi2

from .expr import Expr, differentiate, evaluate_array, simplify
from .funcspace import (
    DEFAULT_QUAD_CONFIG, Interval, QuadratureConfig, from_callable, integrate,
)
from .rng import uniform01_block

_CHUNK_SAMPLES = 1 << 18

CHI_SQUARE_CONFIDENCE = 0.999


@dataclass(frozen=True)
class SimplexSpec:
    """The order cell {a <= t_n <= ... <= t_1 <= x} in dimension n."""

    dimension: int
    a: float
    x: float

    def __post_init__(self):
        if not 1 <= self.dimension <= 12:
            raise ValueError("dimension must be in 1..12")
        if not self.x > self.a:
            raise ValueError("requires x > a")


@dataclass(frozen=True)
class MonteCarloConfig:
    samples: int
    seed: int

    def __post_init__(self):
        if not 1 <= self.samples <= 1_000_000_000:
            raise ValueError("samples must be in 1..1e9")
        if not 0 <= self.seed < (1 << 64):
            raise ValueError("seed must be a 64-bit unsigned integer")


class MonteCarloVolume(NamedTuple):
    estimate: float
    std_error: float


@dataclass(frozen=True)
class PartitionReport:
    """Outcome of classifying cube samples into the n! order cells."""

    dimension: int
    total_samples: int
    classified: int
    discarded_duplicates: int
    cell_counts: tuple[int, ...]       # aligned with sorted permutations
    chi_square: float
    chi_square_threshold: float
    max_cell_z: float
    all_exactly_once: bool
    passed: bool


def simplex_volume_exact(s: SimplexSpec) -> float:
    """(x-a)^n / n!, the cube volume split evenly over the n! orderings."""
    return (s.x - s.a) ** s.dimension / math.factorial(s.dimension)


def _ordered_mask(u: np.ndarray) -> np.ndarray:
    # non-strict descending rows: column 0 holds t_1, the largest coordinate
    return np.all(u[:, :-1] >= u[:, 1:], axis=1)


def simplex_volume_montecarlo(s: SimplexSpec, cfg: MonteCarloConfig) -> MonteCarloVolume:
    """Unbiased estimate of the cell volume from uniform cube samples.

    Deterministic given the seed, and chunk-partitioning invariant: sample
    i is a pure function of (seed, i), and only integer hit counts are
    merged across chunks.
    """
    n = s.dimension
    hits = 0
    done = 0
    while done < cfg.samples:
        m = min(_CHUNK_SAMPLES, cfg.samples - done)
        u = uniform01_block(cfg.seed, done * n, m * n).reshape(m, n)
        hits += int(_ordered_mask(u).sum())
        done += m
    p = hits / cfg.samples
    scale = (s.x - s.a) ** n
    return MonteCarloVolume(
        estimate=scale * p,
        std_error=scale * math.sqrt(p * (1.0 - p) / cfg.samples),
    )


# ---------------------------------------------------------------------------
# Tiling check
# ---------------------------------------------------------------------------

def order_cell_key(coords) -> Optional[tuple[int, ...]]:
    """Permutation key of the (unique) order cell containing the sample,
    or None if any two coordinates coincide (boundary, measure zero)."""
    values = [float(v) for v in coords]
    if len(set(values)) != len(values):
        return None
    order = sorted(range(len(values)), key=lambda i: -values[i])
    return tuple(order)


def _perm_index_table(n: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
    perms = sorted(itertools.permutations(range(n)))
    powers = n ** np.arange(n - 1, -1, -1)
    table = np.full(n ** n, -1, dtype=np.int64)
    for idx, perm in enumerate(perms):
        table[int(np.dot(perm, powers))] = idx
    return perms, table


def partition_counts(u: np.ndarray) -> tuple[np.ndarray, int, bool]:
    """Classify the rows of a sample matrix into order cells.

    Returns (counts aligned with sorted permutations, number of discarded
    duplicate-coordinate rows, exclusivity flag).  The exclusivity flag is
    an honest audit: every kept row is tested against all n! non-strict
    chain predicates and must satisfy exactly one.
    """
    u = np.asarray(u, dtype=float)
    m, n = u.shape
    srt = np.sort(u, axis=1)
    dup = np.any(srt[:, 1:] == srt[:, :-1], axis=1)
    kept = u[~dup]
    discarded = int(dup.sum())

    perms, table = _perm_index_table(n)
    counts = np.zeros(len(perms), dtype=np.int64)
    exactly_once = True
    if kept.shape[0]:
        powers = n ** np.arange(n - 1, -1, -1)
        order = np.argsort(-kept, axis=1, kind="stable")
        codes = order @ powers
        idx = table[codes]
        counts = np.bincount(idx, minlength=len(perms)).astype(np.int64)

        matches = np.zeros(kept.shape[0], dtype=np.int32)
        for perm in perms:
            mask = np.ones(kept.shape[0], dtype=bool)
            for k in range(n - 1):
                mask &= kept[:, perm[k]] >= kept[:, perm[k + 1]]
            matches += mask
        exactly_once = bool((matches == 1).all())
    return counts, discarded, exactly_once


def chi_square_threshold(cells: int, confidence: float = CHI_SQUARE_CONFIDENCE) -> float:
    return float(chi2.ppf(confidence, cells - 1))


def ordering_partition_check(n: int, cfg: MonteCarloConfig) -> PartitionReport:
    """Sample the unit cube and verify the n! order cells tile it evenly."""
    if not 2 <= n <= 6:
        raise ValueError("partition check supports 2 <= n <= 6")
    cells = math.factorial(n)
    counts = np.zeros(cells, dtype=np.int64)
    discarded = 0
    exactly_once = True
    done = 0
    while done < cfg.samples:
        m = min(_CHUNK_SAMPLES, cfg.samples - done)
        u = uniform01_block(cfg.seed, done * n, m * n).reshape(m, n)
        c, d, ok = partition_counts(u)
        counts += c
        discarded += d
        exactly_once = exactly_once and ok
        done += m

    classified = int(counts.sum())
    tally_ok = classified + discarded == cfg.samples
    p = 1.0 / cells
    expected = classified * p
    if classified > 0:
        chi_stat = float(((counts - expected) ** 2 / expected).sum())
        sigma = math.sqrt(p * (1.0 - p) / classified)
        max_z = float(np.max(np.abs(counts / classified - p)) / sigma)
    else:
        chi_stat = math.inf
        max_z = math.inf
    threshold = chi_square_threshold(cells)
    passed = (exactly_once and tally_ok and chi_stat <= threshold and max_z <= 5.0)
    return PartitionReport(
        dimension=n,
        total_samples=cfg.samples,
        classified=classified,
        discarded_duplicates=discarded,
        cell_counts=tuple(int(c) for c in counts),
        chi_square=chi_stat,
        chi_square_threshold=threshold,
        max_cell_z=max_z,
        all_exactly_once=exactly_once,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# Sliced remainder route
# ---------------------------------------------------------------------------

def sliced_simplex_volume(order: int, t: float, a: float, x: float) -> float:
    """Volume (x-t)^order/order! of the slice {t <= t_N <= ... <= t_1 <= x}."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if not a <= t <= x:
        raise ValueError(f"slice position requires a <= t <= x, got a={a}, t={t}, x={x}")
    return (x - t) ** order / math.factorial(order)


def remainder_by_slicing(f: Expr, a: float, order: int, x: float,
                         cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> float:
    """Taylor remainder as the integral of f^(N+1)(t) times the volume of
    the simplex slice with floor t; a third independent remainder route."""
    if order < 0:
        raise ValueError("order must be >= 0")
    a = float(a)
    x = float(x)
    if x == a:
        return 0.0
    deriv = f
    for _ in range(order + 1):
        deriv = simplify(differentiate(deriv))

    lo, hi = min(a, x), max(a, x)
    pad = 1e-9 * (1.0 + hi - lo)
    iv = Interval(lo - pad, hi + pad)

    if x > a:
        def kernel(ts: np.ndarray) -> np.ndarray:
            vols = np.array([sliced_simplex_volume(order, float(t), a, x) for t in ts])
            return evaluate_array(deriv, ts) * vols
    else:
        # mirrored slice: (x-t)^N = (-1)^N * Vol{x <= t_N <= ... <= t_1 <= t}
        sign = (-1.0) ** order

        def kernel(ts: np.ndarray) -> np.ndarray:
            vols = np.array([sliced_simplex_volume(order, x, x, float(t)) for t in ts])
            return sign * evaluate_array(deriv, ts) * vols

    integrand = from_callable(
        lambda t: float(kernel(np.array([t]))[0]), iv,
        f"sliced remainder integrand N={order}", fn_array=kernel,
    )
    return integrate(integrand, a, x, cfg)
