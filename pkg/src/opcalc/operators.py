"""First-class linear operators on function values.

Operators are small immutable trees: differentiation, integration from a
base point, evaluation at a point, identity, scalar multiples, sums,
compositions, and composition powers.  `apply` turns an operator tree plus
a RealFunction into a new RealFunction.

Differentiation is symbolic-only: it requires the operand to be
expression-backed, except that differentiating an integral-backed function
recovers its integrand exactly (the derivative half of the fundamental
theorem).  The same cancellation is applied textually to composition
chains before application, so D composed with I_a collapses to identity;
no other operator-algebra rewriting is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .expr import Expr, const, differentiate, mul, simplify
from .funcspace import (
    DEFAULT_QUAD_CONFIG, Interval, IntegralSource, QuadratureConfig,
    RealFunction, constant_one, from_callable, from_expr, from_integral,
    linear_combination, sup_abs,
)
from .report import CheckReport, from_gap


class UnsupportedDifferentiationError(TypeError):
    """Differentiation was applied to a function with no symbolic backing."""

    def __init__(self, label: str):
        self.label = label
        super().__init__(
            f"cannot differentiate '{label}': no symbolic backing and no "
            f"integral provenance to cancel against"
        )


class OperatorNode:
    """Base class for operator tree nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Differentiate(OperatorNode):
    pass


@dataclass(frozen=True)
class IntegrateFrom(OperatorNode):
    base: float


@dataclass(frozen=True)
class EvaluateAt(OperatorNode):
    base: float


@dataclass(frozen=True)
class Identity(OperatorNode):
    pass


@dataclass(frozen=True)
class Scale(OperatorNode):
    factor: float


@dataclass(frozen=True)
class Sum(OperatorNode):
    left: OperatorNode
    right: OperatorNode


@dataclass(frozen=True)
class Compose(OperatorNode):
    outer: OperatorNode
    inner: OperatorNode


@dataclass(frozen=True)
class Power(OperatorNode):
    inner: OperatorNode
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("operator power requires n >= 1")


def describe(op: OperatorNode) -> str:
    if isinstance(op, Differentiate):
        return "D"
    if isinstance(op, IntegrateFrom):
        return f"I[{op.base}]"
    if isinstance(op, EvaluateAt):
        return f"eval[{op.base}]"
    if isinstance(op, Identity):
        return "id"
    if isinstance(op, Scale):
        return f"scale[{op.factor}]"
    if isinstance(op, Sum):
        return f"({describe(op.left)}+{describe(op.right)})"
    if isinstance(op, Compose):
        return f"{describe(op.outer)}.{describe(op.inner)}"
    if isinstance(op, Power):
        return f"{describe(op.inner)}^{op.n}"
    raise TypeError(f"not an operator node: {op!r}")


# ---------------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------------

def _flatten(op: OperatorNode) -> list[OperatorNode]:
    """Composition chain in application order (outermost first)."""
    if isinstance(op, Compose):
        return _flatten(op.outer) + _flatten(op.inner)
    if isinstance(op, Power):
        return _flatten(op.inner) * op.n
    return [op]


def _cancel_ftoc_pairs(seq: list[OperatorNode]) -> list[OperatorNode]:
    """Drop adjacent (D, I_a) pairs: differentiating an integral from any
    base recovers the integrand."""
    out = list(seq)
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            if isinstance(out[i], Differentiate) and isinstance(out[i + 1], IntegrateFrom):
                del out[i:i + 2]
                changed = True
                break
    return out


def _apply_differentiate(f: RealFunction) -> RealFunction:
    if f.is_expr_backed():
        d = simplify(differentiate(f.as_expr()))
        return from_expr(d, f.domain, f"D({f.label})")
    if isinstance(f.source, IntegralSource):
        return f.source.inner
    raise UnsupportedDifferentiationError(f.label)


def apply(op: OperatorNode, f: RealFunction,
          cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> RealFunction:
    """Apply an operator to a function value, producing a function value."""
    if isinstance(op, Identity):
        return f
    if isinstance(op, Differentiate):
        return _apply_differentiate(f)
    if isinstance(op, IntegrateFrom):
        slack = 1e-9 * (1.0 + f.domain.length())
        if not f.domain.contains(op.base, slack):
            raise ValueError(
                f"integration base {op.base} outside domain "
                f"[{f.domain.a}, {f.domain.b}] of '{f.label}'"
            )
        return from_integral(op.base, f, cfg)
    if isinstance(op, EvaluateAt):
        value = f(op.base)
        return from_expr(const(value), f.domain, f"{f.label}({op.base})*1")
    if isinstance(op, Scale):
        c = op.factor
        if f.is_expr_backed():
            return from_expr(mul(const(c), f.as_expr()), f.domain,
                             f"{c}*({f.label})")
        return from_callable(lambda x: c * f(x), f.domain, f"{c}*({f.label})",
                             fn_array=lambda xs: c * f.eval_array(xs))
    if isinstance(op, Sum):
        left = apply(op.left, f, cfg)
        right = apply(op.right, f, cfg)
        return linear_combination(1.0, left, 1.0, right)
    if isinstance(op, (Compose, Power)):
        chain = _cancel_ftoc_pairs(_flatten(op))
        result = f
        for node in reversed(chain):
            result = apply(node, result, cfg)
        return result
    raise TypeError(f"not an operator node: {op!r}")


# ---------------------------------------------------------------------------
# Named operators and derived quantities
# ---------------------------------------------------------------------------

def ftoc_operator(a: float) -> OperatorNode:
    """The map f -> f(a)*1 + I_a D f, whose fixed points are everything."""
    return Sum(EvaluateAt(a), Compose(IntegrateFrom(a), Differentiate()))


def iterated_integral_one(n: int, a: float, x: float,
                          cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> float:
    """Value of the n-fold iterated integral of 1 from a, at x, computed by
    literally nesting quadrature (no closed form)."""
    if not 1 <= n <= 6:
        raise ValueError("iterated_integral_one supports 1 <= n <= 6")
    a = float(a)
    x = float(x)
    if x == a:
        return 0.0
    lo, hi = min(a, x), max(a, x)
    iv = Interval(lo - 0.5, hi + 0.5)
    g = constant_one(iv)
    for _ in range(n):
        g = apply(IntegrateFrom(a), g, cfg)
    return g(x)


def monotone_bound(n: int, g: RealFunction, a: float, x: float,
                   cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> float:
    """Right-hand side of the iterated monotonicity bound:
    sup over [a,x] of |g| times (x-a)^n / n!."""
    if n < 1:
        raise ValueError("monotone_bound requires n >= 1")
    a = float(a)
    x = float(x)
    if x < a:
        raise ValueError("monotone_bound is stated on [a, x]; requires x >= a")
    if x == a:
        return 0.0
    s = sup_abs(g, Interval(a, x), cfg)
    return s * (x - a) ** n / math.factorial(n)


def check_linearity(op: OperatorNode, f: RealFunction, g: RealFunction,
                    alpha: float, beta: float, probe_points,
                    cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> CheckReport:
    """Max deviation of op(alpha*f + beta*g) from alpha*op(f) + beta*op(g)
    over the probe points, judged against 5x the quadrature tolerance."""
    points = [float(x) for x in probe_points]
    combo = linear_combination(alpha, f, beta, g)
    applied_combo = apply(op, combo, cfg)
    applied_f = apply(op, f, cfg)
    applied_g = apply(op, g, cfg)
    gap = 0.0
    for x in points:
        lhs = applied_combo(x)
        rhs = alpha * applied_f(x) + beta * applied_g(x)
        gap = max(gap, abs(lhs - rhs))
    return from_gap(
        f"linearity[{describe(op)}; {f.label}, {g.label}]",
        gap, 5.0 * cfg.abs_tolerance,
        alpha=alpha, beta=beta, probes=len(points),
    )
