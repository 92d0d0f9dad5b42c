"""Closed-form solutions of dy/dt = D(t)·(c0 + c1·y + c2·y²).

With τ(t) = ∫D the equation becomes autonomous, and its flow is the Möbius
action of exp(τ·a), a = ((c1/2, c0), (−c2, −c1/2)). Because a² = (Δ/4)·I with
Δ = c1² − 4·c0·c2, the exponential has three elementary forms: hyperbolic
(Δ > 0, two equilibria), polynomial (Δ = 0, a double root) and trigonometric
(Δ < 0, no real equilibria, periodic passages through infinity).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from riccatikit.algebra.extreal import ExtReal
from riccatikit.algebra.sl2 import SL2, mobius_entries
from riccatikit.config import OracleConfig, StepControl
from riccatikit.expr.nodes import Expr, Num
from riccatikit.riccati.equation import TargetForm
from riccatikit.solvers.linear import output_times
from riccatikit.solvers.oracle import oracle_integrate
from riccatikit.solvers.quadrature import cumulative, quad
from riccatikit.solvers.trace import SolutionTrace

logger = logging.getLogger(__name__)

DISCRIMINANT_TOL = 1e-12
# Relative band above DISCRIMINANT_TOL handed to the oracle instead.
NEAR_DEGENERATE = 1e-9
# Beyond this |ω·τ| the hyperbolic entries are rescaled by e^(−|ω·τ|).
_RESCALE_AT = 300.0


def discriminant(c0: float, c1: float, c2: float) -> float:
    return c1 * c1 - 4.0 * c0 * c2


def _scale(c0: float, c1: float, c2: float) -> float:
    return c1 * c1 + abs(4.0 * c0 * c2)


def flow_entries(c0: float, c1: float, c2: float, tau: float) -> tuple[float, float, float, float]:
    """exp(τ·a) up to a positive factor."""
    delta = discriminant(c0, c1, c2)
    a = (0.5 * c1, c0, -c2, -0.5 * c1)
    if abs(delta) <= DISCRIMINANT_TOL * _scale(c0, c1, c2):
        ch, sh = 1.0, tau
    elif delta > 0.0:
        w = 0.5 * math.sqrt(delta)
        x = w * tau
        if abs(x) < _RESCALE_AT:
            ch, sh = math.cosh(x), math.sinh(x) / w
        else:
            e = math.exp(-2.0 * abs(x))
            ch, sh = 0.5 * (1.0 + e), math.copysign(0.5 * (1.0 - e), x) / w
    else:
        w = 0.5 * math.sqrt(-delta)
        ch, sh = math.cos(w * tau), math.sin(w * tau) / w
    return (ch + sh * a[0], sh * a[1], sh * a[2], ch + sh * a[3])


def flow(c0: float, c1: float, c2: float, tau: float) -> SL2:
    """exp(τ·a) as a group element."""
    a, b, c, d = flow_entries(c0, c1, c2, tau)
    return SL2.normalized([[a, b], [c, d]])


def equilibria(c0: float, c1: float, c2: float) -> list[float]:
    """Real roots of c0 + c1·y + c2·y², sorted."""
    if c2 == 0.0:
        return [] if c1 == 0.0 else [-c0 / c1]
    delta = discriminant(c0, c1, c2)
    if delta < -DISCRIMINANT_TOL * _scale(c0, c1, c2):
        return []
    root = math.sqrt(max(delta, 0.0))
    return sorted({(-c1 - root) / (2.0 * c2), (-c1 + root) / (2.0 * c2)})


def is_near_degenerate(c0: float, c1: float, c2: float) -> bool:
    scale = _scale(c0, c1, c2)
    d = abs(discriminant(c0, c1, c2))
    return DISCRIMINANT_TOL * scale < d <= NEAR_DEGENERATE * scale


def tau_table(D: Expr, times: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """τ(tᵢ) = ∫_{t0}^{tᵢ} D."""
    if isinstance(D, Num):
        return D.value * (times - times[0])
    return cumulative(D, times, tol)


def _denominator(c0: float, c1: float, c2: float, y0: ExtReal) -> tuple[float, float]:
    """(p, q) such that the Möbius denominator of the flow is p·C(τ) + q·S(τ).

    C and S are the even and odd parts of exp(τ·a) (cosh/sinh, 1/τ or cos/sin).
    """
    if y0.is_infinite:
        return 0.0, -c2
    return 1.0, -c2 * y0.value - 0.5 * c1


def pole_taus(
    c0: float, c1: float, c2: float, y0: ExtReal, lo: float, hi: float
) -> list[float]:
    """Values τ in [lo, hi] where the flow from ``y0`` passes through infinity."""
    p, q = _denominator(c0, c1, c2, y0)
    if p == 0.0 and q == 0.0:
        return []
    delta = discriminant(c0, c1, c2)
    roots: list[float]
    if abs(delta) <= DISCRIMINANT_TOL * _scale(c0, c1, c2):
        roots = [] if q == 0.0 else [-p / q]
    elif delta > 0.0:
        w = 0.5 * math.sqrt(delta)
        r = 0.0 if p == 0.0 else (math.inf if q == 0.0 else -p * w / q)
        roots = [math.atanh(r) / w] if abs(r) < 1.0 else []
    else:
        # One zero per half period of cos/sin.
        w = 0.5 * math.sqrt(-delta)
        x0 = math.atan2(-p, q / w)
        first = math.ceil((w * lo - x0) / math.pi)
        last = math.floor((w * hi - x0) / math.pi)
        roots = [(x0 + m * math.pi) / w for m in range(first, last + 1)]
    return sorted(r for r in roots if lo <= r <= hi)


def _time_of_tau(
    D: Expr, t_a: float, t_b: float, tau_a: float, target: float, tol: float
) -> float:
    """t in [t_a, t_b] with τ(t_a) + ∫_{t_a}^{t} D = target (safeguarded Newton)."""
    if isinstance(D, Num):
        return min(max(t_a + (target - tau_a) / D.value, t_a), t_b)

    def g(t: float) -> float:
        return tau_a + (quad(D, t_a, t, tol).value if t > t_a else 0.0) - target

    a, b = t_a, t_b
    ga = g(a)
    t = 0.5 * (a + b)
    for _ in range(100):
        gt = g(t)
        if abs(gt) <= 1e-14 * (1.0 + abs(target)) or b - a <= 1e-15 * (1.0 + abs(t)):
            break
        if (gt < 0.0) == (ga < 0.0):
            a, ga = t, gt
        else:
            b = t
        slope = float(D.eval(t))
        step = t - gt / slope if slope != 0.0 else math.nan
        t = step if a < step < b else 0.5 * (a + b)
    return t


def pole_times(
    c0: float,
    c1: float,
    c2: float,
    D: Expr,
    y0: ExtReal,
    times: np.ndarray,
    taus: np.ndarray,
    tol: float = 1e-12,
) -> list[float]:
    """Times in (times[0], times[-1]] at which the solution from ``y0`` is infinite."""
    out: list[float] = []
    for i in range(times.size - 1):
        ta, tb = float(taus[i]), float(taus[i + 1])
        for r in pole_taus(c0, c1, c2, y0, min(ta, tb), max(ta, tb)):
            if r == ta:
                continue
            out.append(_time_of_tau(D, float(times[i]), float(times[i + 1]), ta, r, tol))
    return out


def solve_autonomous(
    c0: float,
    c1: float,
    c2: float,
    D: Expr,
    y0: ExtReal,
    t_span: tuple[float, float],
    t_eval: Sequence[float] | int | None = None,
    tol: float = 1e-12,
    control: StepControl | None = None,
    record_poles: bool = False,
) -> SolutionTrace:
    """Solve dy/dt = D(t)·(c0 + c1·y + c2·y²) from y(t_span[0]) = y0.

    Args:
        c0, c1, c2: Constant coefficients.
        D: Time factor; τ = ∫D is computed by quadrature.
        y0: Initial value on the extended line.
        t_span: Forward time span.
        t_eval: Output times or a point count.
        tol: Quadrature tolerance for τ.
        control: Step control for the oracle fallback.
        record_poles: Insert an Infinity sample at every pole passage.

    Returns:
        Trace on the output times, plus the pole samples when ``record_poles``
        is set. ``pole_times`` lists every passage through infinity, located
        from the flow rather than by sampling.
    """
    times = output_times(t_span, t_eval)
    if is_near_degenerate(c0, c1, c2):
        logger.warning(
            "Discriminant %.3e is near-degenerate for c=(%g, %g, %g); using the oracle",
            discriminant(c0, c1, c2), c0, c1, c2,
        )
        span = (float(times[0]), float(times[-1]))
        eq = TargetForm(D, c0, c1, c2).as_equation(span, check=False)
        return oracle_integrate(
            eq, y0, span, control, t_eval=times, oracle=OracleConfig(record_poles=record_poles)
        )

    taus = tau_table(D, times, tol)
    values = [mobius_entries(*flow_entries(c0, c1, c2, float(tau)), y0) for tau in taus]
    trace = SolutionTrace(
        times,
        values,
        meta={"method": "autonomous closed form", "discriminant": discriminant(c0, c1, c2)},
    )
    trace.pole_times = pole_times(c0, c1, c2, D, y0, times, taus, tol)
    return trace.with_pole_samples() if record_poles else trace
