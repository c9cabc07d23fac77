"""Fixed-point iteration toolkit: scalar iteration, Newton's method with
symbolic derivatives, the matrix power method, and the root-as-fixed-point
rewriting.

Convergence claims here are local: non-convergence within the iteration
budget is reported as data in the trace, not raised as an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .expr import DomainError, Expr, add, differentiate, evaluate, simplify, var
from .funcspace import Interval, RealFunction, from_expr


class ZeroDerivativeError(ArithmeticError):
    """Newton step attempted where the derivative vanishes."""

    def __init__(self, iterate: float, index: int):
        self.iterate = iterate
        self.index = index
        super().__init__(f"zero derivative at iterate {index} (x = {iterate})")


class ZeroImageError(ArithmeticError):
    """Power-method step mapped the current vector to zero."""


class IterationDomainError(RuntimeError):
    """Evaluation failed mid-iteration; carries the partial trace."""

    def __init__(self, trace: "IterationTrace", cause: Exception):
        self.trace = trace
        self.cause = cause
        super().__init__(f"iteration aborted after {trace.iterations_used} steps: {cause}")


@dataclass(frozen=True)
class IterationTrace:
    """Iterates (including the start), per-step residuals, and the verdict."""

    iterates: tuple
    residuals: tuple[float, ...]
    converged: bool
    iterations_used: int

    def __post_init__(self):
        if len(self.residuals) != self.iterations_used:
            raise ValueError("need one residual per iteration")
        if len(self.iterates) != self.iterations_used + 1:
            raise ValueError("iterates must include the starting point")

    def final(self):
        return self.iterates[-1]


class SmallMatrix:
    """Dense square matrix, dimension 2..16, row-major entries."""

    def __init__(self, rows):
        array = np.asarray(rows, dtype=float)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise ValueError("matrix must be square")
        d = array.shape[0]
        if not 2 <= d <= 16:
            raise ValueError("dimension must be in 2..16")
        if not np.isfinite(array).all():
            raise ValueError("all entries must be finite")
        self._array = array
        self.entries = tuple(tuple(float(v) for v in row) for row in array)

    @property
    def dimension(self) -> int:
        return self._array.shape[0]

    def as_array(self) -> np.ndarray:
        return self._array.copy()

    def __repr__(self) -> str:
        return f"SmallMatrix({self.entries!r})"


class PowerMethodResult(NamedTuple):
    eigenvalue: float
    eigenvector: np.ndarray
    trace: IterationTrace


def iterate_scalar(g: RealFunction, x0: float, tol: float,
                   max_iter: int) -> IterationTrace:
    """Iterate x <- g(x); converged when successive iterates move <= tol."""
    x = float(x0)
    iterates = [x]
    residuals: list[float] = []
    converged = False
    for _ in range(max_iter):
        try:
            xn = g(x)
        except (DomainError, ValueError, ArithmeticError) as err:
            partial = IterationTrace(tuple(iterates), tuple(residuals),
                                     False, len(residuals))
            raise IterationDomainError(partial, err) from err
        residual = abs(xn - x)
        iterates.append(xn)
        residuals.append(residual)
        x = xn
        if residual <= tol:
            converged = True
            break
    return IterationTrace(tuple(iterates), tuple(residuals), converged,
                          len(residuals))


def newton(f: Expr, x0: float, tol: float, max_iter: int) -> IterationTrace:
    """Newton iteration x <- x - f(x)/f'(x) with the exact symbolic
    derivative; converged when |f(x)| <= tol."""
    fprime = simplify(differentiate(f))
    x = float(x0)
    iterates = [x]
    residuals: list[float] = []
    converged = False
    for k in range(max_iter):
        d = evaluate(fprime, x)
        if d == 0.0:
            raise ZeroDerivativeError(x, k)
        x = x - evaluate(f, x) / d
        residual = abs(evaluate(f, x))
        iterates.append(x)
        residuals.append(residual)
        if residual <= tol:
            converged = True
            break
    return IterationTrace(tuple(iterates), tuple(residuals), converged,
                          len(residuals))


def power_method(M: SmallMatrix, v0, tol: float,
                 max_iter: int) -> PowerMethodResult:
    """Iterate v <- Mv/|Mv|; direction change is compared sign-aligned so a
    negative dominant eigenvalue still registers convergence.  The
    eigenvalue is read off as the Rayleigh quotient of the final vector."""
    A = M.as_array()
    v = np.asarray(v0, dtype=float)
    if v.shape != (M.dimension,):
        raise ValueError(f"v0 must have length {M.dimension}")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("v0 must be nonzero")
    v = v / norm
    iterates = [v.copy()]
    residuals: list[float] = []
    converged = False
    for _ in range(max_iter):
        w = A @ v
        wnorm = float(np.linalg.norm(w))
        if wnorm == 0.0:
            raise ZeroImageError(f"matrix maps iterate {len(residuals)} to zero")
        vn = w / wnorm
        sign = 1.0 if float(vn @ v) >= 0.0 else -1.0
        residual = float(np.linalg.norm(vn - sign * v))
        iterates.append(vn.copy())
        residuals.append(residual)
        v = vn
        if residual <= tol:
            converged = True
            break
    eigenvalue = float(v @ (A @ v))  # Rayleigh quotient; v is unit
    trace = IterationTrace(tuple(iterates), tuple(residuals), converged,
                           len(residuals))
    return PowerMethodResult(eigenvalue, v, trace)


_WIDE_INTERVAL = Interval(-1e9, 1e9)


def root_as_fixed_point(f: Expr) -> RealFunction:
    """g(x) = x + f(x): the fixed points of g are exactly the roots of f."""
    return from_expr(add(var(), f), _WIDE_INTERVAL, "x+f(x)")
