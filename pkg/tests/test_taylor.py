import math

import pytest

from opcalc.expr import const, evaluate, parse, var
from opcalc.funcspace import DEFAULT_QUAD_CONFIG
from opcalc.pool import default_pool
from opcalc.taylor import (
    NESTED_MAX_DEPTH, TaylorExpansion, evaluate_polynomial, expand, ftoc_step,
    remainder_bound, remainder_direct, remainder_exact, remainder_nested,
    remainder_report, verify_exchange,
)

TOL = DEFAULT_QUAD_CONFIG.abs_tolerance
POOL = default_pool()


# ---------------------------------------------------------------------------
# ftoc_step / expand
# ---------------------------------------------------------------------------

def test_single_step_from_exp_base_case():
    t0 = expand(parse("exp(x)"), 0.0, 0)
    assert t0.coefficients == (1.0,)
    t1 = ftoc_step(t0)
    assert t1.order == 1
    assert t1.coefficients == (1.0, 1.0)
    # residual integrand is now the second derivative
    assert evaluate(t1.residual_integrand(), 0.3) == math.exp(0.3)


def test_step_on_constant_adds_zero_coefficient():
    t0 = expand(parse("5"), 0.0, 0)
    t1 = ftoc_step(t0)
    assert t1.coefficients == (5.0, 0.0)
    assert t1.residual_integrand() == const(0.0)


def test_two_steps_for_square():
    t = expand(parse("x^2"), 0.0, 2)
    assert t.coefficients == (0.0, 0.0, 2.0)
    # third derivative vanishes identically
    assert t.residual_integrand() == const(0.0)


def test_expand_exp_coefficients():
    t = expand(parse("exp(x)"), 0.0, 3)
    assert t.coefficients == (1.0, 1.0, 1.0, 1.0)


def test_expand_shifted_quadratic():
    t = expand(parse("x^2-2"), 1.0, 2)
    assert t.coefficients == (-1.0, 2.0, 2.0)


def test_expand_constant_one():
    t = expand(parse("1"), 0.5, 4)
    assert t.coefficients == (1.0, 0.0, 0.0, 0.0, 0.0)


def test_expand_guards():
    with pytest.raises(ValueError):
        expand(parse("x"), 0.0, -1)
    with pytest.raises(ValueError):
        expand(parse("x"), 0.0, 13)


def test_expansion_field_invariants():
    t = expand(parse("sin(x)"), 0.25, 5)
    assert len(t.coefficients) == 6
    assert len(t.derivative_exprs) == 7
    for n, c in enumerate(t.coefficients):
        assert c == evaluate(t.derivative_exprs[n], 0.25)
    with pytest.raises(ValueError):
        TaylorExpansion(0.0, 1, (1.0,), var(), (var(), const(1.0), const(0.0)))


def test_residual_operator_evaluates_remainder():
    from opcalc.funcspace import Interval, from_expr
    from opcalc.operators import apply

    t = expand(parse("exp(x)"), 0.0, 2)
    integrand = from_expr(t.residual_integrand(), Interval(-0.5, 1.5))
    residual = apply(t.residual_operator(), integrand)
    assert residual(1.0) == pytest.approx(remainder_direct(t, 1.0), abs=1e-6)


def test_fixed_point_consistency():
    # expanding N times then stepping equals expanding N+1 times, exactly
    for pf in POOL:
        for order in (0, 2, 4):
            stepped = ftoc_step(expand(pf.expr, pf.base, order))
            direct = expand(pf.expr, pf.base, order + 1)
            assert stepped.coefficients == direct.coefficients
            assert stepped.derivative_exprs == direct.derivative_exprs


# ---------------------------------------------------------------------------
# evaluate_polynomial
# ---------------------------------------------------------------------------

def test_polynomial_value_exp_order_two():
    t = expand(parse("exp(x)"), 0.0, 2)
    assert evaluate_polynomial(t, 1.0) == 2.5


def test_polynomial_at_base_is_first_coefficient():
    t = expand(parse("sin(x)*exp(x)"), 0.7, 4)
    assert evaluate_polynomial(t, 0.7) == t.coefficients[0]


def test_polynomial_reproduces_square_exactly():
    t = expand(parse("x^2"), 0.0, 2)
    assert evaluate_polynomial(t, 3.0) == 9.0


# ---------------------------------------------------------------------------
# remainder routes
# ---------------------------------------------------------------------------

def test_remainder_direct_exp():
    t = expand(parse("exp(x)"), 0.0, 2)
    assert remainder_direct(t, 1.0) == pytest.approx(math.e - 2.5, abs=1e-14)


def test_remainder_direct_cubic_is_zero():
    t = expand(parse("x^3"), 0.0, 3)
    for x in (-2.0, -0.3, 1.7, 4.0):
        assert abs(remainder_direct(t, x)) <= 1e-12 * (1.0 + abs(x) ** 3)


def test_remainder_direct_at_base_is_zero():
    t = expand(parse("ln(1+x)"), 0.0, 3)
    assert remainder_direct(t, 0.0) == 0.0


def test_remainder_exact_matches_direct_exp():
    t = expand(parse("exp(x)"), 0.0, 2)
    direct = remainder_direct(t, 1.0)
    assert remainder_exact(t, 1.0) == pytest.approx(direct, abs=1e-9)
    assert direct == pytest.approx(0.21828183, abs=1e-7)


def test_remainder_exact_zero_integrand():
    t = expand(parse("x^2+3*x"), 0.0, 3)
    assert remainder_exact(t, 2.0) == pytest.approx(0.0, abs=TOL)


def test_remainder_exact_sin_order_one():
    t = expand(parse("sin(x)"), 0.0, 1)
    expected = math.sin(0.5) - 0.5  # direct-evaluation oracle
    assert remainder_exact(t, 0.5) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(-0.02057446, abs=1e-7)


def test_remainder_nested_matches_exact():
    t = expand(parse("exp(x)"), 0.0, 2)
    nested = remainder_nested(t, 1.0)
    assert nested == pytest.approx(remainder_exact(t, 1.0), abs=1e-6)


def test_remainder_nested_constant_function():
    t = expand(parse("4"), 0.0, 2)
    assert remainder_nested(t, 1.0) == pytest.approx(0.0, abs=TOL)


def test_remainder_nested_quartic():
    # P_3 of x^4 about 0 vanishes, so the residual at 1 is exactly 1
    t = expand(parse("x^4"), 0.0, 3)
    assert remainder_nested(t, 1.0) == pytest.approx(1.0, abs=1e-6)


def test_remainder_nested_depth_guard():
    t = expand(parse("exp(x)"), 0.0, NESTED_MAX_DEPTH)
    with pytest.raises(ValueError):
        remainder_nested(t, 1.0)


def test_remainder_bound_exp():
    t = expand(parse("exp(x)"), 0.0, 2)
    assert remainder_bound(t, 1.0) == pytest.approx(math.e / 6.0, rel=1e-9)


def test_remainder_bound_polynomial_is_zero():
    t = expand(parse("x^2"), 0.0, 3)
    assert remainder_bound(t, 1.5) == 0.0


def test_remainder_bound_sin_order_three():
    # sin^(4) = sin, increasing on [0,1]: closed form sin(1)/4!
    t = expand(parse("sin(x)"), 0.0, 3)
    assert remainder_bound(t, 1.0) == pytest.approx(math.sin(1.0) / 24.0, rel=1e-9)


# ---------------------------------------------------------------------------
# verify_exchange
# ---------------------------------------------------------------------------

def test_exchange_constant_integrand():
    report = verify_exchange((parse("1"), parse("1")), 0.0, 1.0)
    assert report.passed
    assert report.details["lhs"] == pytest.approx(0.5, abs=1e-9)
    assert report.details["rhs"] == pytest.approx(0.5, abs=1e-9)


def test_exchange_exp_second_derivative():
    report = verify_exchange((parse("exp(x)"), parse("1")), 0.0, 1.0)
    assert report.passed
    assert report.details["lhs"] == pytest.approx(math.e - 2.0, abs=1e-8)
    assert report.details["rhs"] == pytest.approx(math.e - 2.0, abs=1e-8)


def test_exchange_empty_region():
    report = verify_exchange((parse("sin(x)"), parse("cos(x)")), 0.5, 0.5)
    assert report.passed
    assert report.details["lhs"] == 0.0
    assert report.details["rhs"] == 0.0


# ---------------------------------------------------------------------------
# remainder_report
# ---------------------------------------------------------------------------

def test_report_exp():
    report = remainder_report(parse("exp(x)"), 0.0, 2, 1.0)
    assert report.max_pairwise_gap <= 1e-6
    assert report.bound == pytest.approx(0.45304697, abs=1e-7)
    assert abs(report.direct) == pytest.approx(0.21828183, abs=1e-7)
    assert report.bound >= abs(report.direct)


def test_report_exact_polynomial_case():
    report = remainder_report(parse("x^3"), 0.0, 3, 2.0)
    assert abs(report.direct) <= 10 * TOL
    assert abs(report.exact_integral) <= 10 * TOL
    assert abs(report.nested_integral) <= 1e-6
    assert report.bound == 0.0


def test_report_sin_order_four():
    # oracle: direct evaluation sin(1) - P_4(1), with P_4 = x - x^3/6
    report = remainder_report(parse("sin(x)"), 0.0, 4, 1.0)
    expected = math.sin(1.0) - (1.0 - 1.0 / 6.0)
    assert report.direct == pytest.approx(expected, abs=1e-12)
    assert report.nested_integral is None  # order+1 = 5 exceeds the depth guard
    assert abs(report.direct) <= report.bound
    assert report.bound == pytest.approx(1.0 / 120.0, rel=1e-9)


# ---------------------------------------------------------------------------
# pool-wide invariants
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("pf", POOL, ids=lambda pf: pf.label)
@pytest.mark.parametrize("order", range(6))
def test_remainder_agreement_exact_vs_direct(pf, order):
    t = expand(pf.expr, pf.base, order)
    for x in pf.probes(10):
        direct = remainder_direct(t, x)
        exact = remainder_exact(t, x)
        assert abs(exact - direct) <= max(1e-8, 1e-6 * abs(direct))


@pytest.mark.parametrize("pf", POOL, ids=lambda pf: pf.label)
@pytest.mark.parametrize("order", range(NESTED_MAX_DEPTH - 2))
def test_remainder_agreement_nested_vs_exact(pf, order):
    t = expand(pf.expr, pf.base, order)
    for x in pf.probes(5):
        nested = remainder_nested(t, x)
        exact = remainder_exact(t, x)
        assert abs(nested - exact) <= 1e-6


@pytest.mark.parametrize("pf", POOL, ids=lambda pf: pf.label)
@pytest.mark.parametrize("order", range(6))
def test_remainder_bound_validity(pf, order):
    t = expand(pf.expr, pf.base, order)
    for x in pf.probes(10, nonnegative_only=True):
        direct = remainder_direct(t, x)
        bound = remainder_bound(t, x)
        assert abs(direct) <= bound * (1.0 + 1e-9) + 1e-12


def test_bound_rate_factorial_decay():
    # ratio of successive bounds for exp at x=0.5 is 0.5/(N+2) exactly
    for order in range(5):
        t_n = expand(parse("exp(x)"), 0.0, order)
        t_n1 = expand(parse("exp(x)"), 0.0, order + 1)
        ratio = remainder_bound(t_n1, 0.5) / remainder_bound(t_n, 0.5)
        assert ratio == pytest.approx(0.5 / (order + 2), abs=1e-9)


@pytest.mark.parametrize("text,degree", [("x^2", 2), ("x^3-2*x", 3), ("1+x", 1)])
def test_polynomial_exactness_all_routes(text, degree):
    f = parse(text)
    for order in range(degree, degree + 2):
        t = expand(f, 0.0, order)
        for x in (0.5, 1.0, 1.8):
            assert abs(remainder_direct(t, x)) <= 10 * TOL
            assert abs(remainder_exact(t, x)) <= 10 * TOL
            assert remainder_bound(t, x) <= 10 * TOL
            if order + 1 <= NESTED_MAX_DEPTH:
                assert abs(remainder_nested(t, x)) <= 1e-6
