"""Explicit embedded Runge-Kutta integration with adaptive step control."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from riccatikit.config import StepControl
from riccatikit.errors import InputError, NumericalError, StepUnderflowError

logger = logging.getLogger(__name__)

RHS = Callable[[float, np.ndarray], np.ndarray]
Projection = Callable[[float, np.ndarray], np.ndarray]

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
# Relative spacing below which a step counts as underflowed.
UNDERFLOW = 1e-14


@dataclass(frozen=True)
class ButcherTable:
    """Embedded pair: ``b`` propagates, ``e`` are the error weights (b − b̂)."""

    name: str
    c: tuple[float, ...]
    a: tuple[tuple[float, ...], ...]
    b: tuple[float, ...]
    e: tuple[float, ...]
    order: int
    fsal: bool = False

    @property
    def stages(self) -> int:
        return len(self.c)


DP54 = ButcherTable(
    name="dopri5",
    c=(0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0),
    a=(
        (),
        (1 / 5,),
        (3 / 40, 9 / 40),
        (44 / 45, -56 / 15, 32 / 9),
        (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
        (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
        (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
    ),
    b=(35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0),
    e=(
        71 / 57600,
        0.0,
        -71 / 16695,
        71 / 1920,
        -17253 / 339200,
        22 / 525,
        -1 / 40,
    ),
    order=5,
    fsal=True,
)


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    evaluations: int = 0
    h_min: float = math.inf
    h_max: float = 0.0

    def record(self, h: float) -> None:
        self.accepted += 1
        self.h_min = min(self.h_min, abs(h))
        self.h_max = max(self.h_max, abs(h))

    def as_dict(self) -> dict[str, float]:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "evaluations": self.evaluations,
            "h_min": self.h_min if self.accepted else 0.0,
            "h_max": self.h_max,
        }


@dataclass
class StepAttempt:
    t_new: float
    y_new: np.ndarray
    f_new: np.ndarray
    err: float
    accepted: bool
    h_next: float


@dataclass
class RKResult:
    """Output knots of an integration."""

    times: np.ndarray
    states: np.ndarray
    slopes: np.ndarray
    stats: StepStats = field(default_factory=StepStats)


class EmbeddedRungeKutta:
    """Adaptive integrator for y' = f(t, y) with vector-valued y.

    Args:
        control: Tolerances and step limits.
        table: Embedded pair; Dormand-Prince 5(4) by default.
    """

    def __init__(self, control: StepControl | None = None, table: ButcherTable = DP54) -> None:
        self.control = control or StepControl()
        self.table = table

    # -- single steps -------------------------------------------------------

    def _stages(self, f: RHS, t: float, y: np.ndarray, h: float, k1: np.ndarray) -> list:
        tab = self.table
        ks = [k1]
        for i in range(1, tab.stages):
            yi = y + h * sum(aij * kj for aij, kj in zip(tab.a[i], ks, strict=True) if aij != 0.0)
            ks.append(np.asarray(f(t + tab.c[i] * h, yi), dtype=np.float64))
        return ks

    def error_norm(self, y: np.ndarray, y_new: np.ndarray, err: np.ndarray) -> float:
        """RMS of err/(atol + rtol·max(|y|, |y_new|))."""
        scale = self.control.atol + self.control.rtol * np.maximum(np.abs(y), np.abs(y_new))
        return float(np.sqrt(np.mean((err / scale) ** 2)))

    def attempt(
        self, f: RHS, t: float, y: np.ndarray, h: float, k1: np.ndarray, stats: StepStats
    ) -> StepAttempt:
        """Try one step of size ``h`` from (t, y) with f(t, y) = ``k1``."""
        tab = self.table
        ks = self._stages(f, t, y, h, k1)
        stats.evaluations += tab.stages - 1
        y_new = y + h * sum(bi * ki for bi, ki in zip(tab.b, ks, strict=True) if bi != 0.0)
        if tab.fsal:
            f_new = ks[-1]
        else:
            f_new = np.asarray(f(t + h, y_new), dtype=np.float64)
            stats.evaluations += 1

        if not self._adaptive:
            return StepAttempt(t + h, y_new, f_new, 0.0, True, h)

        err_vec = h * sum(ei * ki for ei, ki in zip(tab.e, ks, strict=True) if ei != 0.0)
        err = self.error_norm(y, y_new, err_vec)
        if not np.all(np.isfinite(y_new)):
            err = math.inf
        if err <= 1.0:
            factor = MAX_FACTOR if err == 0.0 else SAFETY * err ** (-1.0 / tab.order)
            factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            return StepAttempt(t + h, y_new, f_new, err, True, h * factor)
        factor = MIN_FACTOR if not math.isfinite(err) else SAFETY * err ** (-1.0 / tab.order)
        factor = min(1.0, max(MIN_FACTOR, factor))
        return StepAttempt(t + h, y_new, f_new, err, False, h * factor)

    @property
    def _adaptive(self) -> bool:
        return self.control.adaptive and self.control.fixed_step is None

    def initial_step(self, t0: float, t1: float) -> float:
        span = abs(t1 - t0)
        h = self.control.fixed_step if self.control.fixed_step is not None else self.control.h0
        if self.control.hmax is not None:
            h = min(h, self.control.hmax)
        return min(h, span)

    def clamp(self, h: float) -> float:
        if self.control.hmax is not None:
            return min(abs(h), self.control.hmax)
        return abs(h)

    def check_underflow(self, t: float, h: float) -> None:
        if abs(h) < UNDERFLOW * max(1.0, abs(t)):
            raise StepUnderflowError(t, h)

    # -- integration ----------------------------------------------------------

    def integrate(
        self,
        f: RHS,
        t_span: tuple[float, float],
        y0: Sequence[float] | np.ndarray,
        t_eval: Sequence[float] | np.ndarray | None = None,
        project: Projection | None = None,
    ) -> RKResult:
        """Integrate from t_span[0] to t_span[1], landing exactly on every ``t_eval`` time.

        Args:
            f: Right-hand side f(t, y) returning an array shaped like y.
            t_span: Start and end time; integration may run backwards.
            y0: Initial state.
            t_eval: Output times inside the span, ordered in the direction of
                integration. The end time is always reported; every accepted
                step is reported when omitted.
            project: Optional map applied to the state after each accepted step.

        Returns:
            States and slopes at the output times plus step statistics.

        Raises:
            StepUnderflowError: The step size fell below the representable minimum.
            NumericalError: The step budget was exhausted.
        """
        t0, t1 = float(t_span[0]), float(t_span[1])
        direction = 1.0 if t1 >= t0 else -1.0
        y = np.array(y0, dtype=np.float64).reshape(-1)
        knots = _knots(t0, t1, t_eval, direction)
        stats = StepStats()

        k1 = np.asarray(f(t0, y), dtype=np.float64)
        stats.evaluations += 1
        times, states, slopes = [t0], [y.copy()], [k1.copy()]
        if t0 == t1:
            return _result(times, states, slopes, stats)

        t = t0
        h = self.initial_step(t0, t1)
        next_knot = 0
        while next_knot < len(knots):
            if stats.accepted + stats.rejected >= self.control.max_steps:
                raise NumericalError(f"Step budget of {self.control.max_steps} exhausted at t={t}")
            target = knots[next_knot]
            dist = abs(target - t)
            h_prop = self.clamp(h)
            # Stretch by up to 1% rather than leave a sliver before the knot.
            landing = h_prop >= 0.99 * dist
            step = target - t if landing else direction * h_prop
            self.check_underflow(t, step)

            att = self.attempt(f, t, y, step, k1, stats)
            if not att.accepted:
                stats.rejected += 1
                h = abs(att.h_next)
                continue

            stats.record(step)
            t = target if landing else att.t_new
            y = att.y_new
            k1 = att.f_new
            if project is not None:
                y = project(t, y)
                k1 = np.asarray(f(t, y), dtype=np.float64)
                stats.evaluations += 1
            if landing:
                next_knot += 1
                h = max(h_prop, abs(att.h_next)) if self._adaptive else h_prop
            else:
                h = abs(att.h_next)
            if landing or t_eval is None:
                times.append(t)
                states.append(y.copy())
                slopes.append(k1.copy())
        logger.debug("Integration %s -> %s: %s", t0, t1, stats.as_dict())
        return _result(times, states, slopes, stats)


def _knots(
    t0: float, t1: float, t_eval: Sequence[float] | np.ndarray | None, direction: float
) -> list[float]:
    if t_eval is None:
        return [t1]
    pts: list[float] = []
    prev = t0
    for p in (float(t) for t in t_eval):
        if direction * (p - prev) < 0.0:
            raise InputError("Output times must be ordered in the direction of integration")
        if p != prev:
            pts.append(p)
        prev = p
    if pts and direction * (pts[-1] - t1) > 0.0:
        raise InputError("Output times must lie inside the integration span")
    if not pts or pts[-1] != t1:
        pts.append(t1)
    return pts


def _result(times: list[float], states: list, slopes: list, stats: StepStats) -> RKResult:
    return RKResult(
        np.asarray(times, dtype=np.float64),
        np.asarray(states, dtype=np.float64),
        np.asarray(slopes, dtype=np.float64),
        stats,
    )
