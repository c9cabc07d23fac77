import math

import pytest
from hypothesis import given, settings, strategies as st

from opcalc.expr import parse
from opcalc.funcspace import (
    DEFAULT_QUAD_CONFIG, Interval, constant_one, from_expr,
)
from opcalc.operators import (
    Compose, Differentiate, EvaluateAt, Identity, IntegrateFrom, Power, Scale,
    Sum, UnsupportedDifferentiationError, apply, check_linearity, describe,
    ftoc_operator, iterated_integral_one, monotone_bound,
)

TOL = DEFAULT_QUAD_CONFIG.abs_tolerance
IV = Interval(-8.0, 8.0)


def f_of(text, iv=IV):
    return from_expr(parse(text), iv)


# ---------------------------------------------------------------------------
# apply
# ---------------------------------------------------------------------------

def test_apply_differentiate_exp():
    g = apply(Differentiate(), f_of("exp(x)"))
    assert g(0.0) == 1.0


def test_apply_integrate_one():
    g = apply(IntegrateFrom(0.0), constant_one(Interval(-1.0, 1.0)))
    assert g(0.5) == pytest.approx(0.5, abs=TOL)


def test_apply_evaluate_at_makes_constant():
    g = apply(EvaluateAt(0.0), f_of("sin(x)"))
    assert g(7.3) == 0.0
    assert g(-2.0) == 0.0


def test_apply_identity_returns_same_object():
    f = f_of("cos(x)")
    assert apply(Identity(), f) is f


def test_apply_scale_and_sum():
    f = f_of("x")
    g = apply(Scale(3.0), f)
    assert g(2.0) == 6.0
    h = apply(Sum(Scale(2.0), Scale(-1.0)), f)  # (2 - 1) * x
    assert h(5.0) == pytest.approx(5.0, abs=1e-14)


def test_differentiate_requires_symbolic_backing():
    from opcalc.funcspace import from_callable

    f = from_callable(lambda x: x * x, IV, "opaque")
    with pytest.raises(UnsupportedDifferentiationError):
        apply(Differentiate(), f)


def test_differentiate_undoes_integral_exactly():
    # FTOC part 2: the derivative of the running integral is the integrand
    f = f_of("sin(x)*exp(x)")
    integral = apply(IntegrateFrom(0.0), f)
    recovered = apply(Differentiate(), integral)
    assert recovered is f


def test_compose_d_with_integral_cancels():
    f = f_of("sin(x)*exp(x)")
    g = apply(Compose(Differentiate(), IntegrateFrom(0.0)), f)
    assert g is f


def test_cancellation_inside_longer_chains():
    f = f_of("exp(x)")
    # D I D -> D after cancelling the leading pair
    chain = Compose(Differentiate(), Compose(IntegrateFrom(0.0), Differentiate()))
    g = apply(chain, f)
    assert g(0.7) == pytest.approx(math.exp(0.7), rel=1e-12)


def test_integrate_base_outside_domain_rejected():
    f = f_of("x", Interval(0.0, 1.0))
    with pytest.raises(ValueError):
        apply(IntegrateFrom(5.0), f)


def test_power_node_is_repeated_composition():
    one = constant_one(Interval(-0.5, 1.5))
    g = apply(Power(IntegrateFrom(0.0), 3), one)
    assert g(1.0) == pytest.approx(1.0 / 6.0, abs=10 * TOL)
    with pytest.raises(ValueError):
        Power(IntegrateFrom(0.0), 0)


# ---------------------------------------------------------------------------
# ftoc_operator
# ---------------------------------------------------------------------------

def test_ftoc_operator_restores_exp():
    # oracle: direct evaluation exp(1)
    g = apply(ftoc_operator(0.0), f_of("exp(x)"))
    assert g(1.0) == pytest.approx(math.e, abs=5 * TOL)


def test_ftoc_operator_fixes_constant_one():
    one = constant_one(Interval(-2.0, 2.0))
    g = apply(ftoc_operator(0.0), one)
    for x in (-1.5, -0.3, 0.0, 0.9, 2.0):
        assert g(x) == pytest.approx(1.0, abs=5 * TOL)


def test_ftoc_operator_square_from_base_two():
    # oracle: f(2) + integral from 2 to 3 of 2t dt = 4 + 5 = 9
    g = apply(ftoc_operator(2.0), f_of("x^2"))
    assert g(3.0) == pytest.approx(9.0, abs=5 * TOL)


POOL = ["exp(x)", "sin(x)", "cos(x)", "x^3", "(1+x)^(-1)"]
POOL_IV = {"(1+x)^(-1)": Interval(-0.5, 4.0)}


@pytest.mark.parametrize("text", POOL)
def test_ftoc_fixed_point_invariant(text):
    iv = POOL_IV.get(text, IV)
    f = from_expr(parse(text), iv)
    a = 0.0
    g = apply(ftoc_operator(a), f)
    lo = max(iv.a + 0.05, a - 2.0)
    hi = min(iv.b - 0.05, a + 2.0)
    for k in range(20):
        x = lo + (hi - lo) * k / 19.0
        assert abs(g(x) - f(x)) <= 5.0 * TOL


# ---------------------------------------------------------------------------
# iterated_integral_one (closed-form basis values)
# ---------------------------------------------------------------------------

def test_iterated_integral_one_linear():
    assert iterated_integral_one(1, 0.0, 1.0) == pytest.approx(1.0, abs=10 * TOL)


def test_iterated_integral_one_cubic():
    assert iterated_integral_one(3, 0.0, 1.0) == pytest.approx(1.0 / 6.0, abs=10 * TOL)


def test_iterated_integral_one_empty_interval():
    assert iterated_integral_one(2, 1.0, 1.0) == 0.0


def test_iterated_integral_one_guards():
    with pytest.raises(ValueError):
        iterated_integral_one(0, 0.0, 1.0)
    with pytest.raises(ValueError):
        iterated_integral_one(7, 0.0, 1.0)


@given(
    n=st.integers(min_value=1, max_value=4),
    a=st.floats(min_value=-1.0, max_value=1.0),
    dx=st.floats(min_value=-2.0, max_value=2.0),
)
@settings(max_examples=25, deadline=None)
def test_iterated_integral_one_closed_form(n, a, dx):
    x = a + dx
    got = iterated_integral_one(n, a, x)
    expected = dx ** n / math.factorial(n)
    assert abs(got - expected) <= 10.0 * TOL


# ---------------------------------------------------------------------------
# monotone_bound
# ---------------------------------------------------------------------------

def test_monotone_bound_one():
    one = constant_one(Interval(-0.5, 1.5))
    assert monotone_bound(1, one, 0.0, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_monotone_bound_exp():
    # closed form: sup of exp on [0,1] is e; basis factor 1/3!
    got = monotone_bound(3, f_of("exp(x)"), 0.0, 1.0)
    assert got == pytest.approx(math.e / 6.0, rel=1e-9)


def test_monotone_bound_sin():
    got = monotone_bound(2, f_of("sin(x)"), 0.0, math.pi / 2.0)
    assert got == pytest.approx((math.pi / 2.0) ** 2 / 2.0, rel=1e-9)


def test_monotone_bound_rejects_reversed_interval():
    with pytest.raises(ValueError):
        monotone_bound(1, f_of("exp(x)"), 1.0, 0.0)


@pytest.mark.parametrize("text", POOL)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_monotone_bound_dominates_iterated_integral(text, n):
    iv = POOL_IV.get(text, IV)
    g = from_expr(parse(text), iv)
    a = 0.0
    probes = [a + (min(iv.b - 0.1, 2.0) - a) * k / 19.0 for k in range(1, 20)]
    for x in probes:
        nested = g
        for _ in range(n):
            nested = apply(IntegrateFrom(a), nested)
        lhs = abs(nested(x))
        assert lhs <= monotone_bound(n, g, a, x) * (1.0 + 1e-9) + 1e-12


# ---------------------------------------------------------------------------
# check_linearity
# ---------------------------------------------------------------------------

def test_linearity_of_differentiation():
    report = check_linearity(Differentiate(), f_of("sin(x)"), f_of("exp(x)"),
                             2.0, -1.0, [0.0, 0.5, 1.0, -0.7])
    assert report.passed
    assert report.measured_gap <= 1e-10


def test_linearity_of_integration():
    one = constant_one(IV)
    report = check_linearity(IntegrateFrom(0.0), one, one, 1.0, 1.0,
                             [0.25, 0.5, 1.0])
    assert report.passed


def test_linearity_of_evaluation():
    report = check_linearity(EvaluateAt(0.0), f_of("sin(x)"), f_of("cos(x)"),
                             3.0, 4.0, [1.0, 2.0, -3.0])
    assert report.passed
    # both sides are the constant 4
    combo_applied = apply(EvaluateAt(0.0),
                          f_of("3*sin(x)+4*cos(x)"))
    assert combo_applied(2.5) == 4.0


# ---------------------------------------------------------------------------
# Associativity of composition
# ---------------------------------------------------------------------------

_OP_CHOICES = [
    Differentiate(),
    IntegrateFrom(0.0),
    IntegrateFrom(0.5),
    EvaluateAt(0.0),
    EvaluateAt(-0.5),
    Scale(2.0),
    Scale(-0.5),
]


@given(
    i=st.integers(min_value=0, max_value=len(_OP_CHOICES) - 1),
    j=st.integers(min_value=0, max_value=len(_OP_CHOICES) - 1),
    k=st.integers(min_value=0, max_value=len(_OP_CHOICES) - 1),
    fidx=st.integers(min_value=0, max_value=3),
)
@settings(max_examples=60, deadline=None)
def test_composition_associativity(i, j, k, fidx):
    ops = (_OP_CHOICES[i], _OP_CHOICES[j], _OP_CHOICES[k])
    f = f_of(["exp(x)", "sin(x)", "cos(x)", "x^3"][fidx])
    left = Compose(Compose(ops[0], ops[1]), ops[2])
    right = Compose(ops[0], Compose(ops[1], ops[2]))
    try:
        gl = apply(left, f)
    except UnsupportedDifferentiationError:
        with pytest.raises(UnsupportedDifferentiationError):
            apply(right, f)
        return
    gr = apply(right, f)
    probes = [-1.5 + 3.0 * t / 49.0 for t in range(50)]
    for x in probes:
        assert abs(gl(x) - gr(x)) <= 5.0 * TOL


def test_describe_round_trips_structure():
    op = Sum(EvaluateAt(0.0), Compose(IntegrateFrom(0.0), Differentiate()))
    text = describe(op)
    assert "eval[0.0]" in text and "I[0.0]" in text and "D" in text
