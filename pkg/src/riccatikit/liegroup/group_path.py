"""The equation on SL(2,R) whose solutions carry every solution of a Riccati equation.

For dy/dt = b0 + b1·y + b2·y² let a(t) = ((b1/2, b0), (−b2, −b1/2)). If
Ȧ = a(t)·A with A(t0) = I, then y(t) = A(t)·y0 (Möbius action) solves the
equation for every y0, including y0 = ∞.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from riccatikit.algebra.curves import TabulatedCurve
from riccatikit.algebra.extreal import INFINITY, ExtReal
from riccatikit.algebra.sl2 import SL2, mobius
from riccatikit.config import StepControl
from riccatikit.riccati.equation import RiccatiEq
from riccatikit.solvers.linear import output_times
from riccatikit.solvers.rk import EmbeddedRungeKutta
from riccatikit.solvers.trace import SolutionTrace

logger = logging.getLogger(__name__)


def algebra_matrix(b0: float, b1: float, b2: float) -> np.ndarray:
    """a = −(b0·M0 + b1·M1 + b2·M2) as a 2×2 array."""
    return np.array([[0.5 * b1, b0], [-b2, -0.5 * b1]])


def _slope(eq: RiccatiEq, t: float, state: np.ndarray) -> np.ndarray:
    a = algebra_matrix(*eq.coefficients_at(t))
    return (a @ state.reshape(2, 2)).reshape(4)


@dataclass
class GroupPath:
    """Knots A(tᵢ) of a curve in SL(2,R)."""

    times: np.ndarray
    mats: list[SL2]
    slopes: np.ndarray | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.mats)

    def as_curve(self) -> TabulatedCurve:
        """Hermite-interpolated curve through the knots (exact knot slopes when known)."""
        slopes = None if self.slopes is None else list(self.slopes)
        return TabulatedCurve(self.times, self.mats, slopes)

    @property
    def max_det_error(self) -> float:
        return max(abs(m.alpha * m.delta - m.beta * m.gamma - 1.0) for m in self.mats)


def solve_eLA(
    eq: RiccatiEq,
    t_span: tuple[float, float],
    control: StepControl | None = None,
    t_eval: Sequence[float] | int | None = None,
) -> GroupPath:
    """Integrate Ȧ = a(t)·A from A(t_span[0]) = I, renormalizing det after every step.

    Args:
        eq: Riccati equation supplying a(t).
        t_span: Forward time span.
        control: Step control.
        t_eval: Output times starting at t_span[0], or a point count.

    Returns:
        The group path with integrator stats and the largest determinant
        drift seen before renormalization.
    """
    control = control or StepControl()
    times = output_times(t_span, t_eval)
    drift = {"max": 0.0, "per_time": 0.0}
    last = {"t": float(times[0])}

    def f(t: float, x: np.ndarray) -> np.ndarray:
        return _slope(eq, t, x)

    def renormalize(t: float, x: np.ndarray) -> np.ndarray:
        det = x[0] * x[3] - x[1] * x[2]
        err = abs(det - 1.0)
        drift["max"] = max(drift["max"], err)
        dt = abs(t - last["t"])
        if dt > 0.0:
            drift["per_time"] = max(drift["per_time"], err / dt)
        last["t"] = t
        return x / math.sqrt(det)

    rk = EmbeddedRungeKutta(control)
    result = rk.integrate(
        f, (float(times[0]), float(times[-1])), [1.0, 0.0, 0.0, 1.0], times, renormalize
    )
    mats = [SL2(*map(float, x)) for x in result.states]
    slopes = np.array(
        [_slope(eq, float(t), x) for t, x in zip(result.times, result.states, strict=True)]
    )
    meta = {
        "stats": result.stats.as_dict(),
        "max_det_drift": drift["max"],
        "det_drift_per_time": drift["per_time"],
    }
    logger.debug("solve_eLA on [%g, %g]: %s", times[0], times[-1], meta)
    return GroupPath(result.times, mats, slopes, meta)


def reconstruct(path: GroupPath, y0: ExtReal) -> SolutionTrace:
    """y(tᵢ) = A(tᵢ)·y0."""
    values = [mobius(m, y0) for m in path.mats]
    trace = SolutionTrace(path.times.copy(), values, meta={"method": "group path"})
    trace.pole_times = [float(t) for t, v in zip(trace.times, values, strict=True) if v.is_infinite]
    return trace


def fundamental_solutions(path: GroupPath) -> tuple[SolutionTrace, SolutionTrace, SolutionTrace]:
    """The solutions through 0, ∞ and 1; with the cross-ratio they give every other one."""
    return (
        reconstruct(path, ExtReal(0.0)),
        reconstruct(path, INFINITY),
        reconstruct(path, ExtReal(1.0)),
    )
