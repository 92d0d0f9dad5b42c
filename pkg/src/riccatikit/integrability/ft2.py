"""Affine changes y' = G·(y + M) found by integrating an auxiliary (D, M) system.

For dy/dt = b0 + b1·y + b2·y² and constants (c0, c1, c2), any solution of

    dD/dt = (b1 + ḃ2/b2)·D − c1·D² − 2·b2·M·D
    dM/dt = −b0 + (c0·c2/b2)·D² + b1·M − b2·M²

gives G = b2/(D·c2), and y' = G·(y + M) solves dy'/dt = D·(c0 + c1·y' + c2·y'²).
The system carries no integrability condition; the price is a second ODE.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from riccatikit.algebra.curves import AnalyticCurve
from riccatikit.algebra.extreal import INFINITY, ExtReal
from riccatikit.algebra.hermite import HermiteTable
from riccatikit.config import StepControl
from riccatikit.errors import DegenerateTransformError, InputError
from riccatikit.expr import sqrt
from riccatikit.expr.grid import Grid
from riccatikit.expr.nodes import Closure, Diff, Expr, Num
from riccatikit.riccati.equation import ZERO_TOL, RiccatiEq, TargetForm, nonvanishing
from riccatikit.solvers.linear import output_times
from riccatikit.solvers.rk import RHS, EmbeddedRungeKutta
from riccatikit.solvers.trace import SolutionTrace

logger = logging.getLogger(__name__)


def _log_derivative(e: Expr) -> Expr:
    return Num(0.0) if isinstance(e, Num) else Diff(e) / e


def ft2_rhs(eq: RiccatiEq, c: tuple[float, float, float]) -> RHS:
    """Right-hand side of the (D, M) system."""
    c0, c1, c2 = c
    lr = _log_derivative(eq.b2)

    def f(t: float, x: np.ndarray) -> np.ndarray:
        D, M = float(x[0]), float(x[1])
        b0, b1, b2 = eq.coefficients_at(t)
        dD = (b1 + lr.eval(t)) * D - c1 * D * D - 2.0 * b2 * M * D
        dM = -b0 + (c0 * c2 / b2) * D * D + b1 * M - b2 * M * M
        return np.array([dD, dM])

    return f


@dataclass
class FT2Result:
    """Sampled D and M with the affine change they define.

    Args:
        eq: Source equation.
        c: Target constants (c0, c1, c2).
        times: Output times.
        D, M: Values at ``times``.
        D_slopes, M_slopes: Exact derivatives from the system at ``times``.
    """

    eq: RiccatiEq
    c: tuple[float, float, float]
    times: np.ndarray
    D: np.ndarray
    M: np.ndarray
    D_slopes: np.ndarray
    M_slopes: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.table = HermiteTable(
            self.times,
            np.column_stack([self.D, self.M]),
            np.column_stack([self.D_slopes, self.M_slopes]),
        )

    @property
    def span(self) -> tuple[float, float]:
        return self.table.span

    def G_values(self) -> np.ndarray:
        b2 = np.array([self.eq.b2.eval(float(t)) for t in self.times])
        return b2 / (self.D * self.c[2])

    def _value_nodes(self) -> tuple[Closure, Closure]:
        return (
            Closure(lambda x: self.table.evaluate(x, 0), label="D (table)"),
            Closure(lambda x: self.table.evaluate(x, 1), label="M (table)"),
        )

    def D_expr(self) -> Closure:
        """D as an expression whose derivative is the system's first equation."""
        Dv, Mv = self._value_nodes()
        _, b1, b2 = self.eq.coefficients
        c1 = self.c[1]
        slope = (b1 + _log_derivative(b2)) * Dv - c1 * Dv * Dv - 2.0 * b2 * Mv * Dv
        return Closure(lambda x: self.table.evaluate(x, 0), derivative=slope, label="D")

    def M_expr(self) -> Closure:
        """M as an expression whose derivative is the system's second equation."""
        Dv, Mv = self._value_nodes()
        b0, b1, b2 = self.eq.coefficients
        c0, _, c2 = self.c
        slope = -b0 + (c0 * c2) * Dv * Dv / b2 + b1 * Mv - b2 * Mv * Mv
        return Closure(lambda x: self.table.evaluate(x, 1), derivative=slope, label="M")

    def target_equation(self) -> TargetForm:
        return TargetForm(self.D_expr(), *self.c)

    def change_at(self, t: float) -> tuple[float, float]:
        """(G, M) at time ``t``."""
        D = float(self.table.evaluate(t, 0))
        M = float(self.table.evaluate(t, 1))
        return self.eq.b2.eval(t) / (D * self.c[2]), M

    def push(self, trace: SolutionTrace) -> SolutionTrace:
        """y'ᵢ = G(tᵢ)·(yᵢ + M(tᵢ)); orientation-reversing G < 0 is allowed here."""

        def apply(t: float, y: ExtReal) -> ExtReal:
            if y.is_infinite:
                return INFINITY
            G, M = self.change_at(t)
            return ExtReal(G * (y.value + M))

        out = trace.map(apply)
        out.pole_times = list(trace.pole_times)
        return out

    def as_curve(self) -> AnalyticCurve:
        """The change as (√G, M·√G, 0, 1/√G); needs G > 0 on the span."""
        if np.any(self.G_values() <= 0.0):
            raise InputError("G changes orientation; the change is not a curve in SL(2,R)")
        G = self.eq.b2 / (self.c[2] * self.D_expr())
        root = sqrt(G)
        return AnalyticCurve(root, self.M_expr() * root, Num(0.0), 1.0 / root, self.span, False)


def ft2_system(
    eq: RiccatiEq,
    c0: float,
    c1: float,
    c2: float,
    D0: float,
    M0: float,
    t_span: tuple[float, float],
    control: StepControl | None = None,
    t_eval: Sequence[float] | int | None = None,
) -> FT2Result:
    """Integrate the (D, M) system from (D0, M0) at t_span[0].

    Raises:
        DegenerateTransformError: D reaches zero; the change degenerates.
        StepUnderflowError: The integrator could not make progress.
    """
    if c2 == 0.0:
        raise InputError("c2 must be non-zero")
    if D0 == 0.0:
        raise InputError("D0 must be non-zero")
    times = output_times(t_span, t_eval)
    span = (float(times[0]), float(times[-1]))
    b2 = Grid.chebyshev(*span, 64).sample(eq.b2)
    if not nonvanishing(b2):
        raise InputError("b2 must not vanish on the span")

    c = (float(c0), float(c1), float(c2))
    f = ft2_rhs(eq, c)
    rk = EmbeddedRungeKutta(control or StepControl())
    result = rk.integrate(f, span, [float(D0), float(M0)], times)
    D, M = result.states[:, 0], result.states[:, 1]

    floor = ZERO_TOL * abs(D0)
    bad = (np.abs(D) <= floor) | (np.sign(D) != np.sign(D0))
    if np.any(bad):
        i = int(np.argmax(bad))
        t_cross = float(result.times[i])
        if i > 0 and D[i] * D[i - 1] < 0.0:
            t_cross = float(
                result.times[i - 1]
                - D[i - 1] * (result.times[i] - result.times[i - 1]) / (D[i] - D[i - 1])
            )
        raise DegenerateTransformError(t_cross)

    out = FT2Result(
        eq, c, result.times, D, M, result.slopes[:, 0], result.slopes[:, 1],
        {"stats": result.stats.as_dict()},
    )
    logger.debug("ft2_system: %s", out.meta["stats"])
    return out
