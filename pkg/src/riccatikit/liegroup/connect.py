"""The linear system whose solutions are curves Ā(t) mapping one Riccati equation to another.

If A and A' solve the group equations of b and b', then Ā = A'·A⁻¹ obeys
Ā̇ = a'·Ā − Ā·a. Written for x = (α, β, γ, δ) this is

    α̇ = (b1' − b1)/2·α + b2·β + b0'·γ
    β̇ = −b0·α + (b1' + b1)/2·β + b0'·δ
    γ̇ = −b2'·α − (b1' + b1)/2·γ + b2·δ
    δ̇ = −b2'·β − b0·γ − (b1' − b1)/2·δ

and det x = αδ − βγ is a first integral.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from riccatikit.algebra.curves import TabulatedCurve
from riccatikit.algebra.sl2 import SL2
from riccatikit.config import StepControl
from riccatikit.errors import DeterminantError
from riccatikit.riccati.equation import RiccatiEq
from riccatikit.solvers.linear import output_times
from riccatikit.solvers.rk import EmbeddedRungeKutta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConnectState:
    alpha: float
    beta: float
    gamma: float
    delta: float

    @property
    def det(self) -> float:
        return self.alpha * self.delta - self.beta * self.gamma

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma, self.delta], dtype=np.float64)


def connect_matrix(
    b: tuple[float, float, float], bp: tuple[float, float, float]
) -> np.ndarray:
    """The 4×4 matrix of the connecting system at one time."""
    b0, b1, b2 = b
    p0, p1, p2 = bp
    minus, plus = 0.5 * (p1 - b1), 0.5 * (p1 + b1)
    return np.array([
        [minus, b2, p0, 0.0],
        [-b0, plus, 0.0, p0],
        [-p2, 0.0, -plus, b2],
        [0.0, -p2, -b0, -minus],
    ])


@dataclass
class ConnectPath:
    """Sampled solution x(tᵢ) of the connecting system."""

    times: np.ndarray
    states: np.ndarray
    slopes: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.times.size)

    def state(self, i: int) -> ConnectState:
        return ConnectState(*map(float, self.states[i]))

    @property
    def dets(self) -> np.ndarray:
        s = self.states
        return s[:, 0] * s[:, 3] - s[:, 1] * s[:, 2]

    @property
    def max_det_drift(self) -> float:
        d = self.dets
        return float(np.max(np.abs(d - d[0])))

    @property
    def max_offdiagonal(self) -> float:
        return float(np.max(np.abs(self.states[:, 1]) + np.abs(self.states[:, 2])))

    def as_curve(self) -> TabulatedCurve:
        """Knots scaled to unit determinant; needs det x0 > 0.

        The whole curve is flipped to −X when the first knot has negative trace.
        """
        d0 = float(self.dets[0])
        if not d0 > 0.0:
            raise DeterminantError(f"Connecting curve has det {d0!r}; cannot normalize")
        first = SL2.normalized(self.states[0].reshape(2, 2))
        sign = 1.0 if first.canonical() is first else -1.0
        k = sign / np.sqrt(self.dets)
        mats = [SL2.normalized(sign * s.reshape(2, 2)) for s in self.states]
        slopes = [sl * ki for sl, ki in zip(self.slopes, k, strict=True)]
        return TabulatedCurve(self.times, mats, slopes)


def solve_connect(
    eq: RiccatiEq,
    target: RiccatiEq,
    x0: ConnectState | Sequence[float],
    t_span: tuple[float, float],
    control: StepControl | None = None,
    t_eval: Sequence[float] | int | None = None,
) -> ConnectPath:
    """Integrate the connecting system from x(t_span[0]) = x0.

    Args:
        eq: Source equation (coefficients b).
        target: Target equation (coefficients b').
        x0: Initial (α, β, γ, δ).
        t_span: Forward time span.
        control: Step control.
        t_eval: Output times starting at t_span[0], or a point count.

    Returns:
        States, exact slopes and integrator stats at the output times.
    """
    control = control or StepControl()
    times = output_times(t_span, t_eval)
    start = x0.as_array() if isinstance(x0, ConnectState) else np.asarray(x0, dtype=np.float64)

    def f(t: float, x: np.ndarray) -> np.ndarray:
        return connect_matrix(eq.coefficients_at(t), target.coefficients_at(t)) @ x

    rk = EmbeddedRungeKutta(control)
    result = rk.integrate(f, (float(times[0]), float(times[-1])), start, times)
    path = ConnectPath(
        result.times, result.states, result.slopes, {"stats": result.stats.as_dict()}
    )
    path.meta["max_det_drift"] = path.max_det_drift
    logger.debug("solve_connect: det drift %.3e, %s", path.max_det_drift, path.meta["stats"])
    return path
