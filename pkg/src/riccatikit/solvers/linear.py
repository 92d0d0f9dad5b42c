"""Inhomogeneous linear equations dy/dt = a(t) + b(t)·y by two quadratures."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from riccatikit.algebra.curves import Domain
from riccatikit.algebra.extreal import ExtReal
from riccatikit.algebra.hermite import HermiteTable
from riccatikit.errors import DomainError, InputError
from riccatikit.expr.nodes import Closure, Expr, Num
from riccatikit.solvers.quadrature import quad
from riccatikit.solvers.trace import SolutionTrace

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 201


@dataclass(frozen=True)
class LinearEq:
    """dy/dt = a(t) + b(t)·y."""

    a: Expr
    b: Expr
    domain: Domain = (-math.inf, math.inf)

    def rhs(self, t: float, y: float) -> float:
        return self.a.eval(t) + self.b.eval(t) * y


def output_times(t_span: tuple[float, float], t_eval: Sequence[float] | int | None) -> np.ndarray:
    """Increasing output times starting at t_span[0]."""
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise InputError(f"t_span must run forward, got ({t0}, {t1})")
    if t_eval is None or isinstance(t_eval, int):
        n = DEFAULT_POINTS if t_eval is None else t_eval
        return np.linspace(t0, t1, max(n, 2))
    times = np.asarray(t_eval, dtype=np.float64)
    if times.size == 0 or times[0] != t0 or times[-1] > t1 or np.any(np.diff(times) <= 0.0):
        raise InputError("t_eval must increase from t_span[0] and stay inside the span")
    return times


class Primitive:
    """B(t) = ∫_{t0}^t b, tabulated at knots and completed by quad inside a segment."""

    def __init__(
        self, b: Expr | Callable[[float], float], knots: np.ndarray, tol: float
    ) -> None:
        self.b = b
        self.tol = tol
        self.knots = knots
        self.constant = b.value if isinstance(b, Num) else None
        values = [0.0]
        for lo, hi in zip(knots[:-1], knots[1:], strict=True):
            values.append(values[-1] + self._piece(float(lo), float(hi)))
        self.values = np.asarray(values)

    def _piece(self, lo: float, hi: float) -> float:
        if self.constant is not None:
            return self.constant * (hi - lo)
        return quad(self.b, lo, hi, self.tol).value

    def at(self, t: float, segment: int) -> float:
        return float(self.values[segment]) + self._piece(float(self.knots[segment]), t)

    def __call__(self, t: float) -> float:
        """B(t) for any t inside the knot span."""
        lo, hi = float(self.knots[0]), float(self.knots[-1])
        if not lo <= t <= hi:
            raise DomainError(f"outside primitive span [{lo}, {hi}]", t=t)
        i = int(np.searchsorted(self.knots, t, side="right")) - 1
        return self.at(t, min(max(i, 0), self.knots.size - 2))


def solve_linear(
    eq: LinearEq,
    y0: float | ExtReal,
    t_span: tuple[float, float],
    t_eval: Sequence[float] | int | None = None,
    tol: float = 1e-12,
) -> SolutionTrace:
    """y(t) = e^{B(t)}·(y0 + ∫ e^{−B}·a) with B = ∫ b, segment by segment.

    Args:
        eq: Linear equation.
        y0: Finite initial value at t_span[0].
        t_span: Forward time span.
        t_eval: Output times (starting at t_span[0]) or a point count.
        tol: Quadrature tolerance.

    Returns:
        Trace on the output times.
    """
    y_start = float(y0) if not isinstance(y0, ExtReal) else y0.value
    if not math.isfinite(y_start):
        raise InputError("Linear equations need a finite initial value")
    times = output_times(t_span, t_eval)
    prim = Primitive(eq.b, times, tol)

    a_is_zero = isinstance(eq.a, Num) and eq.a.value == 0.0
    values = [y_start]
    forcing = 0.0
    for i in range(1, times.size):
        lo, hi = float(times[i - 1]), float(times[i])
        if not a_is_zero:
            seg = i - 1

            def integrand(s: float, seg: int = seg) -> float:
                return math.exp(-prim.at(s, seg)) * eq.a.eval(s)

            forcing += quad(integrand, lo, hi, tol).value
        growth = float(prim.values[i])
        try:
            values.append(math.exp(growth) * (y_start + forcing))
        except OverflowError as err:
            raise DomainError("linear solution overflows", t=hi) from err
    logger.debug("solve_linear: %d points on [%g, %g]", times.size, times[0], times[-1])
    return SolutionTrace(times, [ExtReal(v) for v in values], meta={"method": "quadratures"})


def linear_closure(
    eq: LinearEq,
    t0: float,
    y0: float,
    knots: Sequence[float] | np.ndarray,
    label: str = "linear solution",
) -> Closure:
    """The quadrature solution as an expression node.

    Values come from a Hermite table on ``knots`` with exact slopes a + b·y;
    the derivative is the equation itself, so the node differentiates twice.
    """
    times = np.asarray(knots, dtype=np.float64)
    if times[0] != t0:
        raise InputError("linear_closure knots must start at t0")
    trace = solve_linear(eq, y0, (float(times[0]), float(times[-1])), times)
    values = trace.as_array()
    slopes = np.array([eq.rhs(float(t), float(v)) for t, v in zip(times, values, strict=True)])
    table = HermiteTable(times, values, slopes)
    value_only = table.closure(label=f"{label} (table)")
    return Closure(table.evaluate, derivative=eq.a + eq.b * value_only, label=label)
