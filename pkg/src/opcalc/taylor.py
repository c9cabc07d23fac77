"""Taylor expansion built by iterating the FTOC substitution, and the
remainder evaluated along four independent routes.

The expansion never touches a closed-form coefficient rule: starting from
f = f(a)*1 + I_a D f, each step substitutes the same identity into the
residual term, which promotes one derivative value into the coefficient
list and leaves the residual as the (N+1)-fold integral of the (N+1)-th
derivative.  Coefficients store derivative values f^(n)(a); the 1/n! is
applied when the polynomial is evaluated, matching the operator-series
form where the n-th coefficient multiplies the n-fold integral of 1.

Remainder routes:
  direct          f(x) - P_N(x)
  exact_integral  single quadrature of (x-t)^N/N! * f^(N+1)(t)
  nested_integral N+1 literally nested quadratures (pre-exchange order)
  bound           sup|f^(N+1)| * |x-a|^(N+1)/(N+1)!
Their mutual agreement is what the test suites certify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .expr import (
    Expr, const, differentiate, evaluate, mul, power, render, simplify, sub,
    var,
)
from .funcspace import (
    DEFAULT_QUAD_CONFIG, Interval, QuadratureConfig, from_callable, from_expr,
    integrate, sup_abs,
)
from .operators import IntegrateFrom, Power, apply
from .report import CheckReport, from_gap

NESTED_MAX_DEPTH = 4  # nested quadrature cost grows as nodes**(N+1)


@dataclass(frozen=True)
class TaylorExpansion:
    """Expansion of `source` about `base` to order `order`.

    coefficients[n] is the derivative value f^(n)(base) (no factorial);
    derivative_exprs[n] is the exact symbolic n-th derivative, kept one
    order past the expansion so the residual integrand is always at hand.
    """

    base: float
    order: int
    coefficients: tuple[float, ...]
    source: Expr
    derivative_exprs: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.coefficients) != self.order + 1:
            raise ValueError("need exactly order+1 coefficients")
        if len(self.derivative_exprs) != self.order + 2:
            raise ValueError("need exactly order+2 derivative expressions")

    def residual_integrand(self) -> Expr:
        """The (N+1)-th derivative, the integrand of the residual term."""
        return self.derivative_exprs[-1]

    def residual_operator(self) -> Power:
        """The operator I_a^{N+1} whose image of the (N+1)-th derivative is
        the remainder; apply it to residual_integrand() to evaluate."""
        return Power(IntegrateFrom(self.base), self.order + 1)


@dataclass(frozen=True)
class RemainderReport:
    """Remainder at one evaluation point along every available route."""

    x: float
    order: int
    direct: float
    exact_integral: float
    nested_integral: Optional[float]
    bound: float
    max_pairwise_gap: float


def _initial_expansion(f: Expr, a: float) -> TaylorExpansion:
    a = float(a)
    first = simplify(differentiate(f))
    return TaylorExpansion(
        base=a,
        order=0,
        coefficients=(evaluate(f, a),),
        source=f,
        derivative_exprs=(f, first),
    )


def ftoc_step(partial: TaylorExpansion) -> TaylorExpansion:
    """One fixed-point substitution: the residual I_a^{N+1} D^{N+1} f becomes
    D^{N+1} f(a) * I_a^{N+1} 1 plus the next residual, promoting one new
    coefficient."""
    next_deriv = simplify(differentiate(partial.derivative_exprs[-1]))
    new_coeff = evaluate(partial.derivative_exprs[partial.order + 1], partial.base)
    return TaylorExpansion(
        base=partial.base,
        order=partial.order + 1,
        coefficients=partial.coefficients + (new_coeff,),
        source=partial.source,
        derivative_exprs=partial.derivative_exprs + (next_deriv,),
    )


def expand(f: Expr, a: float, order: int) -> TaylorExpansion:
    """Apply ftoc_step `order` times starting from the FTOC base case."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if order > 12:
        raise ValueError("order capped at 12 (cost guard)")
    t = _initial_expansion(f, a)
    for _ in range(order):
        t = ftoc_step(t)
    return t


def evaluate_polynomial(t: TaylorExpansion, x: float) -> float:
    """P_N(x) via Horner in the shifted variable (x - base)."""
    u = float(x) - t.base
    acc = t.coefficients[t.order] / math.factorial(t.order)
    for n in range(t.order - 1, -1, -1):
        acc = t.coefficients[n] / math.factorial(n) + u * acc
    return acc


def remainder_direct(t: TaylorExpansion, x: float) -> float:
    return evaluate(t.source, x) - evaluate_polynomial(t, x)


def _span_interval(a: float, x: float) -> Interval:
    lo, hi = min(a, x), max(a, x)
    pad = 1e-9 * (1.0 + hi - lo)
    return Interval(lo - pad, hi + pad)


def remainder_exact(t: TaylorExpansion, x: float,
                    cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> float:
    """Single quadrature of (x-t)^N/N! * f^(N+1)(t) from base to x."""
    x = float(x)
    a = t.base
    if x == a:
        return 0.0
    n = t.order
    kernel = mul(const(1.0 / math.factorial(n)), power(sub(const(x), var()), float(n)))
    integrand = mul(kernel, t.derivative_exprs[n + 1])
    f = from_expr(integrand, _span_interval(a, x),
                  f"remainder integrand N={n} of {render(t.source)}")
    return integrate(f, a, x, cfg)


def remainder_nested(t: TaylorExpansion, x: float,
                     cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> float:
    """The residual as N+1 literally nested quadratures, innermost variable
    integrated first from the base, before any order exchange.

    Inner levels run at a loosened absolute tolerance (1e-8) to bound cost;
    only the outermost level uses the caller's tolerance.
    """
    n = t.order
    if n + 1 > NESTED_MAX_DEPTH:
        raise ValueError(
            f"nested remainder supports order+1 <= {NESTED_MAX_DEPTH}"
        )
    x = float(x)
    a = t.base
    if x == a:
        return 0.0
    inner_cfg = QuadratureConfig(
        abs_tolerance=max(cfg.abs_tolerance, 1e-8),
        rel_tolerance=cfg.rel_tolerance,
        max_subdivision_depth=min(cfg.max_subdivision_depth, 20),
        base_rule=cfg.base_rule,
    )
    g = from_expr(t.derivative_exprs[n + 1], _span_interval(a, x))
    for level in range(n + 1):
        level_cfg = cfg if level == n else inner_cfg
        g = apply(IntegrateFrom(a), g, level_cfg)
    return g(x)


def remainder_bound(t: TaylorExpansion, x: float,
                    cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> float:
    """sup over the span of |f^(N+1)| times |x-a|^(N+1)/(N+1)!.

    For x < a the sup is taken over [x, a] (oriented extension of the
    stated inequality).
    """
    x = float(x)
    a = t.base
    if x == a:
        return 0.0
    n = t.order
    iv = Interval(min(a, x), max(a, x))
    deriv = from_expr(t.derivative_exprs[n + 1], _span_interval(a, x))
    s = sup_abs(deriv, iv, cfg)
    return s * abs(x - a) ** (n + 1) / math.factorial(n + 1)


def verify_exchange(g: tuple[Expr, Expr], a: float, upper: float,
                    cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> CheckReport:
    """Check the order-exchange identity for a product integrand
    g(t_i, t_j) = gi(t_i) * gj(t_j):

        int_a^u int_a^{t_j} g dt_i dt_j  ==  int_a^u int_{t_i}^u g dt_j dt_i

    Both sides are evaluated honestly as nested quadratures.
    """
    gi, gj = g
    a = float(a)
    upper = float(upper)
    iv = _span_interval(a, upper) if upper != a else Interval(a - 1e-9, a + 1e-9)
    fi = from_expr(gi, iv, f"gi={render(gi)}")
    fj = from_expr(gj, iv, f"gj={render(gj)}")

    def lhs_integrand(tj: float) -> float:
        return fj(tj) * integrate(fi, a, tj, cfg)

    def rhs_integrand(ti: float) -> float:
        return fi(ti) * integrate(fj, ti, upper, cfg)

    lhs_fn = from_callable(
        lhs_integrand, iv, "inner integral, original order",
        fn_array=lambda ts: fj.eval_array(ts)
        * np.array([integrate(fi, a, float(t), cfg) for t in ts]),
    )
    rhs_fn = from_callable(
        rhs_integrand, iv, "inner integral, exchanged order",
        fn_array=lambda ts: fi.eval_array(ts)
        * np.array([integrate(fj, float(t), upper, cfg) for t in ts]),
    )
    lhs = integrate(lhs_fn, a, upper, cfg)
    rhs = integrate(rhs_fn, a, upper, cfg)
    return from_gap(
        f"exchange[{render(gi)} x {render(gj)}; a={a}, u={upper}]",
        abs(lhs - rhs), 10.0 * cfg.abs_tolerance,
        lhs=lhs, rhs=rhs,
    )


def remainder_report(f: Expr, a: float, order: int, x: float,
                     cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> RemainderReport:
    """All remainder routes at one point, with their max pairwise gap."""
    t = expand(f, a, order)
    direct = remainder_direct(t, x)
    exact = remainder_exact(t, x, cfg)
    nested = remainder_nested(t, x, cfg) if order + 1 <= NESTED_MAX_DEPTH else None
    bound = remainder_bound(t, x, cfg)
    values = [direct, exact] + ([nested] if nested is not None else [])
    gap = max(abs(p - q) for p in values for q in values)
    return RemainderReport(
        x=float(x), order=order, direct=direct, exact_integral=exact,
        nested_integral=nested, bound=bound, max_pairwise_gap=gap,
    )
