"""Reference integrator for Riccati equations on the compactified line.

The oracle integrates y while |y| stays below the switch threshold and
w = −1/y otherwise; w obeys the Riccati equation with coefficients
(b2, −b1, b0), so passing through infinity is an ordinary zero of w.
Switching back happens when |w| exceeds the same threshold, which gives a
hysteresis band symmetric under y ↔ −1/y.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from riccatikit.algebra.extreal import INFINITY, ExtReal
from riccatikit.config import OracleConfig, StepControl
from riccatikit.errors import NumericalError
from riccatikit.riccati.equation import RiccatiEq
from riccatikit.solvers.linear import output_times
from riccatikit.solvers.rk import RHS, EmbeddedRungeKutta, StepStats
from riccatikit.solvers.trace import ChartSwitch, SolutionTrace
from riccatikit.types import Chart

logger = logging.getLogger(__name__)

_SECANT_ITERATIONS = 60


class _Charted:
    """Right-hand sides of the y and w = −1/y charts."""

    def __init__(self, eq: RiccatiEq) -> None:
        self.eq = eq

    def rhs(self, chart: Chart) -> RHS:
        b0, b1, b2 = self.eq.coefficients

        if chart is Chart.DIRECT:
            def f(t: float, y: np.ndarray) -> np.ndarray:
                v = y[0]
                return np.array([b0.eval(t) + (b1.eval(t) + b2.eval(t) * v) * v])
        else:
            def f(t: float, w: np.ndarray) -> np.ndarray:
                v = w[0]
                return np.array([b2.eval(t) + (-b1.eval(t) + b0.eval(t) * v) * v])

        return f


def _to_ext(chart: Chart, v: float) -> ExtReal:
    if chart is Chart.DIRECT:
        return ExtReal(v)
    return INFINITY if v == 0.0 else ExtReal(-1.0 / v)


def _hermite_defect(
    f: RHS, t0: float, u0: float, f0: float, t1: float, u1: float, f1: float
) -> float:
    """|p'(m) − f(m, p(m))| at the midpoint of the cubic Hermite step interpolant."""
    h = t1 - t0
    um = 0.5 * (u0 + u1) + h * (f0 - f1) / 8.0
    dm = 1.5 * (u1 - u0) / h - 0.25 * (f0 + f1)
    fm = float(f(t0 + 0.5 * h, np.array([um]))[0])
    return abs(dm - fm) / (1.0 + abs(fm))


def oracle_integrate(
    eq: RiccatiEq,
    y0: ExtReal,
    t_span: tuple[float, float],
    control: StepControl | None = None,
    t_eval: Sequence[float] | int | None = None,
    oracle: OracleConfig | None = None,
) -> SolutionTrace:
    """Integrate ``eq`` from y(t_span[0]) = y0 through poles if necessary.

    Args:
        eq: Equation to integrate.
        y0: Initial value; Infinity starts in the inverted chart at w = 0.
        t_span: Forward time span.
        control: Step control (rtol, atol, h0, hmax, max_steps).
        t_eval: Output times starting at t_span[0], or a point count.
        oracle: Switch threshold and pole recording.

    Returns:
        Trace on the output times, plus inserted Infinity samples at pole
        passages when pole recording is on.

    Raises:
        StepUnderflowError: The step size fell below the representable minimum.
    """
    control = control or StepControl()
    oracle = oracle or OracleConfig()
    threshold = oracle.switch_threshold
    rk = EmbeddedRungeKutta(control)
    charts = _Charted(eq)
    times = output_times(t_span, t_eval)
    stats = StepStats()

    if y0.is_infinite:
        chart, u = Chart.INVERTED, 0.0
    elif abs(y0.value) > threshold:
        chart, u = Chart.INVERTED, -1.0 / y0.value
    else:
        chart, u = Chart.DIRECT, y0.value
    f = charts.rhs(chart)
    t = float(times[0])
    k1 = f(t, np.array([u]))

    out_t: list[float] = [t]
    out_v: list[ExtReal] = [y0]
    out_c: list[Chart] = [chart]
    poles: list[float] = []
    switches: list[ChartSwitch] = []
    defect = 0.0

    h = rk.initial_step(t, float(times[-1]))
    for target in (float(x) for x in times[1:]):
        while t < target:
            if stats.accepted + stats.rejected >= control.max_steps:
                raise NumericalError(f"Step budget of {control.max_steps} exhausted at t={t}")
            h_prop = rk.clamp(h)
            landing = h_prop >= 0.99 * (target - t)
            step = target - t if landing else h_prop
            rk.check_underflow(t, step)
            att = rk.attempt(f, t, np.array([u]), step, k1, stats)
            if not att.accepted:
                stats.rejected += 1
                h = abs(att.h_next)
                continue
            stats.record(step)
            t_new = target if landing else att.t_new
            u_new = float(att.y_new[0])
            f_new = att.f_new
            defect = max(
                defect,
                _hermite_defect(f, t, u, float(k1[0]), t_new, u_new, float(f_new[0])),
            )

            if chart is Chart.INVERTED and (u * u_new < 0.0 or (u_new == 0.0 and u != 0.0)):
                tp = _locate_zero(rk, f, t, u, k1, step, u_new)
                poles.append(tp)
                if oracle.record_poles and tp < t_new and tp > out_t[-1]:
                    out_t.append(tp)
                    out_v.append(INFINITY)
                    out_c.append(Chart.INVERTED)

            t, u, k1 = t_new, u_new, f_new
            h = max(h_prop, abs(att.h_next)) if landing else abs(att.h_next)

            if abs(u) > threshold:
                before = chart
                chart = Chart.INVERTED if chart is Chart.DIRECT else Chart.DIRECT
                u_after = -1.0 / u
                switches.append(ChartSwitch(t, before, u, u_after))
                logger.debug("Chart switch at t=%.17g: %s -> %s", t, before, chart)
                u = u_after
                f = charts.rhs(chart)
                k1 = f(t, np.array([u]))
                stats.evaluations += 1

        out_t.append(t)
        out_v.append(_to_ext(chart, u))
        out_c.append(chart)

    trace = SolutionTrace(
        np.asarray(out_t),
        out_v,
        out_c,
        residual=defect,
        pole_times=poles,
        switches=switches,
        meta={"method": "oracle", "stats": stats.as_dict()},
    )
    logger.debug("Oracle finished: %s, %d poles", stats.as_dict(), len(poles))
    return trace


def _locate_zero(
    rk: EmbeddedRungeKutta, f: RHS, t: float, w: float, k1: np.ndarray, h: float, w_end: float
) -> float:
    """Zero of w inside one accepted step, by regula falsi on single RK steps."""
    if w_end == 0.0:
        return t + h
    scratch = StepStats()
    lo, hi = 0.0, h
    w_lo, w_hi = w, w_end
    s = hi
    side = 0
    for _ in range(_SECANT_ITERATIONS):
        s = (lo * w_hi - hi * w_lo) / (w_hi - w_lo)
        if not lo < s < hi:
            s = 0.5 * (lo + hi)
        ws = float(rk.attempt(f, t, np.array([w]), s, k1, scratch).y_new[0])
        if ws == 0.0 or hi - lo <= 1e-15 * max(1.0, abs(t)):
            break
        if ws * w_lo < 0.0:
            hi, w_hi = s, ws
            if side == -1:
                w_lo *= 0.5
            side = -1
        else:
            lo, w_lo = s, ws
            if side == 1:
                w_hi *= 0.5
            side = 1
        if abs(ws) < 1e-15:
            break
    return t + s
