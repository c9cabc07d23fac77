import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opcalc import simplex as sx
from opcalc.expr import parse
from opcalc.simplex import (
    MonteCarloConfig, SimplexSpec, chi_square_threshold, order_cell_key,
    ordering_partition_check, partition_counts, remainder_by_slicing,
    simplex_volume_exact, simplex_volume_montecarlo, sliced_simplex_volume,
)
from opcalc.taylor import expand, remainder_exact


# ---------------------------------------------------------------------------
# exact volumes
# ---------------------------------------------------------------------------

def test_volume_three_dimensional():
    # the 3-cube splits into 3! = 6 equal order cells
    assert simplex_volume_exact(SimplexSpec(3, 0.0, 1.0)) == pytest.approx(1.0 / 6.0)


def test_volume_one_dimensional():
    assert simplex_volume_exact(SimplexSpec(1, 0.0, 2.0)) == 2.0


def test_volume_four_dimensional():
    assert simplex_volume_exact(SimplexSpec(4, 0.0, 1.0)) == pytest.approx(1.0 / 24.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        SimplexSpec(0, 0.0, 1.0)
    with pytest.raises(ValueError):
        SimplexSpec(13, 0.0, 1.0)
    with pytest.raises(ValueError):
        SimplexSpec(3, 1.0, 1.0)
    with pytest.raises(ValueError):
        MonteCarloConfig(samples=0, seed=1)
    with pytest.raises(ValueError):
        MonteCarloConfig(samples=100, seed=-1)


@given(
    n=st.integers(min_value=2, max_value=12),
    a=st.floats(min_value=-3.0, max_value=3.0),
    width=st.floats(min_value=0.1, max_value=4.0),
)
@settings(max_examples=60, deadline=None)
def test_dimensional_recursion(n, a, width):
    x = a + width
    ratio = simplex_volume_exact(SimplexSpec(n, a, x)) / simplex_volume_exact(
        SimplexSpec(n - 1, a, x))
    assert abs(ratio - width / n) <= 1e-12 * max(1.0, width / n)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def test_montecarlo_three_dimensional_hits_exact():
    # binomial sampling oracle: expected hit fraction 1/6
    spec = SimplexSpec(3, 0.0, 1.0)
    est, se = simplex_volume_montecarlo(spec, MonteCarloConfig(1_000_000, seed=42))
    assert abs(est - 1.0 / 6.0) <= 4.0 * se


def test_montecarlo_one_dimensional_is_exact():
    spec = SimplexSpec(1, 0.0, 1.5)
    est, se = simplex_volume_montecarlo(spec, MonteCarloConfig(10_000, seed=9))
    assert est == 1.5
    assert se == 0.0


def test_montecarlo_reproducible():
    spec = SimplexSpec(2, 0.0, 1.0)
    cfg = MonteCarloConfig(100_000, seed=42)
    first = simplex_volume_montecarlo(spec, cfg)
    second = simplex_volume_montecarlo(spec, cfg)
    assert first == second


def test_montecarlo_chunking_invariant(monkeypatch):
    # merging disjoint counter blocks must be bit-identical to one pass
    spec = SimplexSpec(3, 0.0, 1.0)
    cfg = MonteCarloConfig(50_000, seed=7)
    whole = simplex_volume_montecarlo(spec, cfg)
    monkeypatch.setattr(sx, "_CHUNK_SAMPLES", 1024)
    chunked = simplex_volume_montecarlo(spec, cfg)
    assert whole == chunked


def test_montecarlo_scaled_interval():
    spec = SimplexSpec(2, 1.0, 3.0)
    est, se = simplex_volume_montecarlo(spec, MonteCarloConfig(500_000, seed=3))
    assert abs(est - 2.0) <= 4.0 * se  # (x-a)^2/2! = 2


# ---------------------------------------------------------------------------
# tiling / partition check
# ---------------------------------------------------------------------------

def test_order_cell_key_basic():
    assert order_cell_key((0.9, 0.5, 0.1)) == (0, 1, 2)
    assert order_cell_key((0.1, 0.5, 0.9)) == (2, 1, 0)
    assert order_cell_key((0.5, 0.9, 0.1)) == (1, 0, 2)


def test_order_cell_key_duplicate_is_none():
    assert order_cell_key((0.5, 0.5, 0.1)) is None
    assert order_cell_key((0.25, 0.1, 0.25)) is None


def test_partition_counts_constructed_duplicates():
    u = np.array([
        [0.9, 0.5, 0.1],   # descending cell (0,1,2)
        [0.5, 0.5, 0.1],   # duplicate -> discarded, counted
        [0.1, 0.5, 0.9],   # ascending cell (2,1,0)
        [0.3, 0.3, 0.3],   # duplicate -> discarded, counted
    ])
    counts, discarded, exactly_once = partition_counts(u)
    assert discarded == 2
    assert counts.sum() == 2
    assert exactly_once


def test_partition_counts_matches_scalar_key():
    from opcalc.rng import uniform01_block

    u = uniform01_block(11, 0, 300 * 3).reshape(300, 3)
    counts, discarded, _ = partition_counts(u)
    assert discarded == 0
    import itertools
    perms = sorted(itertools.permutations(range(3)))
    manual = {p: 0 for p in perms}
    for row in u:
        manual[order_cell_key(row)] += 1
    assert list(counts) == [manual[p] for p in perms]


def test_partition_check_three_dimensional():
    report = ordering_partition_check(3, MonteCarloConfig(600_000, seed=42))
    assert report.passed
    assert report.all_exactly_once
    assert report.classified + report.discarded_duplicates == report.total_samples
    assert len(report.cell_counts) == 6
    assert report.max_cell_z <= 5.0
    assert report.chi_square <= report.chi_square_threshold


def test_partition_check_two_cells_sum_to_one():
    report = ordering_partition_check(2, MonteCarloConfig(100_000, seed=5))
    freqs = [c / report.classified for c in report.cell_counts]
    assert sum(freqs) == 1.0
    assert report.passed


def test_partition_check_dimension_guard():
    with pytest.raises(ValueError):
        ordering_partition_check(1, MonteCarloConfig(100, seed=1))
    with pytest.raises(ValueError):
        ordering_partition_check(7, MonteCarloConfig(100, seed=1))


def test_chi_square_threshold_pinned():
    # published 99.9% quantile for 5 degrees of freedom
    assert chi_square_threshold(6) == pytest.approx(20.515, abs=1e-2)


# ---------------------------------------------------------------------------
# sliced volumes and the slicing remainder route
# ---------------------------------------------------------------------------

def test_sliced_volume_half():
    # Monte Carlo oracle over the 2-cube with floor 0 gives 1/2
    assert sliced_simplex_volume(2, 0.0, 0.0, 1.0) == 0.5


def test_sliced_volume_degenerate():
    assert sliced_simplex_volume(3, 1.0, 0.0, 1.0) == 0.0


def test_sliced_volume_linear():
    assert sliced_simplex_volume(1, 0.25, 0.0, 1.0) == 0.75


def test_sliced_volume_monte_carlo_oracle():
    # fraction of the unit square with t <= t_2 <= t_1 <= 1 for floor t=0.3
    from opcalc.rng import uniform01_block

    t = 0.3
    u = uniform01_block(123, 0, 2 * 200_000).reshape(200_000, 2)
    inside = (u[:, 0] >= u[:, 1]) & (u[:, 1] >= t)
    p = inside.mean()
    se = math.sqrt(p * (1 - p) / len(u))
    assert abs(sliced_simplex_volume(2, t, 0.0, 1.0) - p) <= 4.0 * se


def test_sliced_volume_preconditions():
    with pytest.raises(ValueError):
        sliced_simplex_volume(2, -0.1, 0.0, 1.0)
    with pytest.raises(ValueError):
        sliced_simplex_volume(2, 1.1, 0.0, 1.0)
    with pytest.raises(ValueError):
        sliced_simplex_volume(-1, 0.5, 0.0, 1.0)


def test_remainder_by_slicing_exp():
    # must match the direct-evaluation oracle
    expected = math.e - 2.5
    got = remainder_by_slicing(parse("exp(x)"), 0.0, 2, 1.0)
    assert got == pytest.approx(expected, abs=1e-8)


def test_remainder_by_slicing_polynomial_zero():
    assert remainder_by_slicing(parse("x^2-3"), 0.0, 2, 1.7) == pytest.approx(0.0, abs=1e-10)


def test_remainder_by_slicing_sin():
    got = remainder_by_slicing(parse("sin(x)"), 0.0, 1, 0.5)
    assert got == pytest.approx(math.sin(0.5) - 0.5, abs=1e-8)
    assert got == pytest.approx(-0.02057446, abs=1e-7)


@pytest.mark.parametrize("text,a", [
    ("exp(x)", 0.0), ("sin(x)", 0.0), ("cos(x)", 0.5), ("x^5", 0.0),
    ("(1+x)^(-1)", 0.0), ("ln(1+x)", 0.0),
])
@pytest.mark.parametrize("order", [0, 1, 2, 3])
def test_slicing_consistency_with_exact(text, a, order):
    f = parse(text)
    t = expand(f, a, order)
    for x in (a + 0.3, a + 0.75):
        sliced = remainder_by_slicing(f, a, order, x)
        exact = remainder_exact(t, x)
        assert abs(sliced - exact) <= 1e-8


def test_slicing_handles_x_below_base():
    f = parse("exp(x)")
    t = expand(f, 0.0, 2)
    x = -0.6
    sliced = remainder_by_slicing(f, 0.0, 2, x)
    exact = remainder_exact(t, x)
    assert abs(sliced - exact) <= 1e-8
