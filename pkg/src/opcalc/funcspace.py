"""Evaluable real functions over intervals, plus the numerical primitives
that realize the integral operator and the sup-norm bound machinery.

Quadrature is adaptive bisection over a fixed 15-point Gauss-Kronrod panel;
the panel error estimate is the difference between the Kronrod value and
the embedded 7-point Gauss value.  A non-nested 15/7 Gauss pair built from
numpy's Legendre nodes is available as an alternative rule and doubles as
an independent cross-check of the embedded constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .expr import Expr, evaluate, evaluate_array, render


class ToleranceNotMetError(ArithmeticError):
    """Quadrature ran out of subdivision depth above the error budget."""

    def __init__(self, requested: float, achieved: float, interval: tuple):
        self.requested = requested
        self.achieved = achieved
        self.interval = interval
        super().__init__(
            f"quadrature error estimate {achieved:.3e} exceeds budget "
            f"{requested:.3e} on {interval} at maximum subdivision depth"
        )


@dataclass(frozen=True)
class Interval:
    """Closed interval [a, b] with a < b, both finite."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if not self.a < self.b:
            raise ValueError(f"interval requires a < b, got [{self.a}, {self.b}]")

    def length(self) -> float:
        return self.b - self.a

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.a - slack <= x <= self.b + slack


# ---------------------------------------------------------------------------
# Panel rules.
#
# The Gauss-Kronrod 15 abscissae/weights below are the standard published
# values (the odd-indexed abscissae are exactly the 7-point Gauss nodes).
# tests/test_funcspace.py re-derives the Gauss subset from numpy's Legendre
# solver and pins the Kronrod half by polynomial degree exactness.
# ---------------------------------------------------------------------------

_GK15_ABSCISSAE_HALF = np.array([
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
])

_GK15_WEIGHTS_HALF = np.array([
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
])

_G7_WEIGHTS_HALF = np.array([
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
])


def _mirror(half: np.ndarray, negate: bool) -> np.ndarray:
    head = -half[:-1] if negate else half[:-1]
    return np.concatenate([head, half[::-1]])


_GK15_NODES = _mirror(_GK15_ABSCISSAE_HALF, negate=True)       # ascending, 15
_GK15_WEIGHTS = _mirror(_GK15_WEIGHTS_HALF, negate=False)
_G7_EMBEDDED = np.zeros(15)
_G7_EMBEDDED[1::2] = _mirror(_G7_WEIGHTS_HALF, negate=False)   # Gauss nodes sit at odd slots

_G15_NODES, _G15_WEIGHTS = np.polynomial.legendre.leggauss(15)
_G7_NODES, _G7_WEIGHTS = np.polynomial.legendre.leggauss(7)


def _panel_gk15(feval, lo: float, hi: float) -> tuple[float, float]:
    hw = 0.5 * (hi - lo)
    mid = 0.5 * (lo + hi)
    vals = feval(mid + hw * _GK15_NODES)
    high = hw * float(np.dot(_GK15_WEIGHTS, vals))
    low = hw * float(np.dot(_G7_EMBEDDED, vals))
    return high, abs(high - low)


def _panel_gauss_pair(feval, lo: float, hi: float) -> tuple[float, float]:
    hw = 0.5 * (hi - lo)
    mid = 0.5 * (lo + hi)
    high = hw * float(np.dot(_G15_WEIGHTS, feval(mid + hw * _G15_NODES)))
    low = hw * float(np.dot(_G7_WEIGHTS, feval(mid + hw * _G7_NODES)))
    return high, abs(high - low)


PANEL_RULES = {
    "gk15": _panel_gk15,
    "gauss15_7": _panel_gauss_pair,
}


@dataclass(frozen=True)
class QuadratureConfig:
    """Error control for the adaptive quadrature."""

    abs_tolerance: float = 1e-10
    rel_tolerance: float = 0.0
    max_subdivision_depth: int = 48
    base_rule: str = "gk15"

    def __post_init__(self):
        if not self.abs_tolerance >= 1e-14:
            raise ValueError("abs_tolerance must be at least 1e-14")
        if self.rel_tolerance < 0.0:
            raise ValueError("rel_tolerance must be non-negative")
        if not 1 <= self.max_subdivision_depth <= 60:
            raise ValueError("max_subdivision_depth must be in 1..60")
        if self.base_rule not in PANEL_RULES:
            raise ValueError(f"unknown base rule {self.base_rule!r}")


DEFAULT_QUAD_CONFIG = QuadratureConfig()


# ---------------------------------------------------------------------------
# RealFunction: an evaluable real->real value with provenance.  Provenance
# matters for the operator layer: an integral-backed function remembers its
# integrand so differentiation can undo it exactly.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExprSource:
    expr: Expr


class OneSource:
    """Marker for the constant function 1."""

    _instance: Optional["OneSource"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance


@dataclass(frozen=True)
class IntegralSource:
    base: float
    inner: "RealFunction"
    cfg: QuadratureConfig


@dataclass(frozen=True)
class ClosureSource:
    fn: Callable[[float], float]
    fn_array: Optional[Callable[[np.ndarray], np.ndarray]] = None


Source = Union[ExprSource, OneSource, IntegralSource, ClosureSource]


@dataclass(frozen=True)
class RealFunction:
    """A function value: evaluable on its interval, immutable, pure."""

    source: Source
    domain: Interval
    label: str

    def __call__(self, x: float) -> float:
        s = self.source
        if isinstance(s, ExprSource):
            return evaluate(s.expr, x)
        if isinstance(s, OneSource):
            return 1.0
        if isinstance(s, IntegralSource):
            return integrate(s.inner, s.base, x, s.cfg)
        return s.fn(x)

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        s = self.source
        xs = np.asarray(xs, dtype=float)
        if isinstance(s, ExprSource):
            return evaluate_array(s.expr, xs)
        if isinstance(s, OneSource):
            return np.ones_like(xs)
        if isinstance(s, ClosureSource) and s.fn_array is not None:
            return np.asarray(s.fn_array(xs), dtype=float)
        return np.array([self(float(x)) for x in xs])

    def is_expr_backed(self) -> bool:
        return isinstance(self.source, (ExprSource, OneSource))

    def as_expr(self) -> Expr:
        s = self.source
        if isinstance(s, ExprSource):
            return s.expr
        if isinstance(s, OneSource):
            from .expr import const
            return const(1.0)
        raise ValueError(f"function '{self.label}' has no symbolic backing")


def from_expr(e: Expr, domain: Interval, label: str | None = None) -> RealFunction:
    return RealFunction(ExprSource(e), domain, label if label is not None else render(e))


def constant_one(iv: Interval) -> RealFunction:
    """The constant function 1 on the interval."""
    return RealFunction(OneSource(), iv, "1")


def from_callable(fn: Callable[[float], float], domain: Interval, label: str,
                  fn_array: Callable[[np.ndarray], np.ndarray] | None = None) -> RealFunction:
    return RealFunction(ClosureSource(fn, fn_array), domain, label)


def from_integral(base: float, inner: RealFunction,
                  cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> RealFunction:
    return RealFunction(IntegralSource(float(base), inner, cfg), inner.domain,
                        f"I[{base}]({inner.label})")


def linear_combination(alpha: float, f: RealFunction, beta: float,
                       g: RealFunction) -> RealFunction:
    """alpha*f + beta*g, staying symbolic when both operands are."""
    domain = Interval(max(f.domain.a, g.domain.a), min(f.domain.b, g.domain.b))
    label = f"{alpha}*({f.label})+{beta}*({g.label})"
    if f.is_expr_backed() and g.is_expr_backed():
        from .expr import add, const, mul
        combined = add(mul(const(alpha), f.as_expr()), mul(const(beta), g.as_expr()))
        return from_expr(combined, domain, label)
    return from_callable(
        lambda x: alpha * f(x) + beta * g(x), domain, label,
        fn_array=lambda xs: alpha * f.eval_array(xs) + beta * g.eval_array(xs),
    )


def absolute(f: RealFunction) -> RealFunction:
    """|f| as an evaluable function (closure-backed)."""
    return from_callable(lambda x: abs(f(x)), f.domain, f"|{f.label}|",
                         fn_array=lambda xs: np.abs(f.eval_array(xs)))


# ---------------------------------------------------------------------------
# integrate: a single application of the integral operator, evaluated at x.
# ---------------------------------------------------------------------------

def _adapt(panel, feval, lo, hi, value, err, budget, floor, depth, cfg):
    if err <= budget or err <= floor:
        return value
    mid = 0.5 * (lo + hi)
    if depth <= 0:
        raise ToleranceNotMetError(budget, err, (lo, hi))
    if not (lo < mid < hi):
        return value  # interval at float resolution; nothing left to split
    lv, le = panel(feval, lo, mid)
    rv, re_ = panel(feval, mid, hi)
    half = 0.5 * budget
    return (_adapt(panel, feval, lo, mid, lv, le, half, floor, depth - 1, cfg)
            + _adapt(panel, feval, mid, hi, rv, re_, half, floor, depth - 1, cfg))


def integrate(f: RealFunction, a: float, x: float,
              cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> float:
    """Estimate of the integral of f from a to x.

    Antisymmetric by construction: the oriented interval is integrated and
    the sign flipped when x < a.
    """
    a = float(a)
    x = float(x)
    if x == a:
        return 0.0
    sign = 1.0
    lo, hi = a, x
    if hi < lo:
        lo, hi = hi, lo
        sign = -1.0
    slack = 1e-9 * (1.0 + f.domain.length())
    if not (f.domain.contains(lo, slack) and f.domain.contains(hi, slack)):
        raise ValueError(
            f"integration range [{lo}, {hi}] outside domain "
            f"[{f.domain.a}, {f.domain.b}] of '{f.label}'"
        )
    panel = PANEL_RULES[cfg.base_rule]
    feval = f.eval_array
    value, err = panel(feval, lo, hi)
    budget = max(cfg.abs_tolerance, cfg.rel_tolerance * abs(value))
    floor = 1e-15 * (1.0 + abs(value))
    total = _adapt(panel, feval, lo, hi, value, err, budget, floor,
                   cfg.max_subdivision_depth, cfg)
    return sign * total


# ---------------------------------------------------------------------------
# sup_abs: sampling-based estimate of sup |f| over an interval.
# ---------------------------------------------------------------------------

_SUP_SAMPLES = 1025  # dense pass, endpoints included
_SUP_REFINE_ROUNDS = 9
_SUP_REFINE_POINTS = 33


def sup_abs(f: RealFunction, iv: Interval,
            cfg: QuadratureConfig = DEFAULT_QUAD_CONFIG) -> float:
    """Estimate of sup over iv of |f|: dense scan plus local refinement.

    The result is never below the largest sampled |f|.
    """
    xs = np.linspace(iv.a, iv.b, _SUP_SAMPLES)
    vals = np.abs(f.eval_array(xs))
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, _SUP_SAMPLES - 1)]
    for _ in range(_SUP_REFINE_ROUNDS):
        grid = np.linspace(lo, hi, _SUP_REFINE_POINTS)
        gvals = np.abs(f.eval_array(grid))
        j = int(np.argmax(gvals))
        best = max(best, float(gvals[j]))
        lo = grid[max(j - 1, 0)]
        hi = grid[min(j + 1, _SUP_REFINE_POINTS - 1)]
        if hi - lo <= 1e-14 * (1.0 + abs(hi)):
            break
    return best
