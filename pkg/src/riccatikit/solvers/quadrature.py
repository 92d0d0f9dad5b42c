"""Adaptive Gauss-Kronrod (7-15) quadrature."""

from __future__ import annotations

import heapq
import logging
import math
from collections.abc import Callable, Sequence
from typing import NamedTuple

import numpy as np

from riccatikit.errors import QuadratureError
from riccatikit.expr.nodes import Expr

logger = logging.getLogger(__name__)

Integrand = Expr | Callable[[float], float]

# Kronrod abscissae on [0, 1); odd indices are the Gauss points.
XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_EPS = float(np.finfo(np.float64).eps)


class QuadResult(NamedTuple):
    value: float
    error: float
    subdivisions: int = 1


class _Piece(NamedTuple):
    lo: float
    hi: float
    value: float
    error: float


def _as_callable(f: Integrand) -> Callable[[float], float]:
    return f.eval if isinstance(f, Expr) else f


def gk15(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    """One 15-point Kronrod rule with the QUADPACK error estimate."""
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fc = f(centre)
    x = half * XGK[:7]
    f1 = np.array([f(centre - xi) for xi in x])
    f2 = np.array([f(centre + xi) for xi in x])

    res_k = WGK[7] * fc + float(np.dot(WGK[:7], f1 + f2))
    res_g = WG[3] * fc + float(np.dot(WG[:3], (f1 + f2)[1::2]))
    mean = 0.5 * res_k
    resabs = WGK[7] * abs(fc) + float(np.dot(WGK[:7], np.abs(f1) + np.abs(f2)))
    resasc = WGK[7] * abs(fc - mean) + float(
        np.dot(WGK[:7], np.abs(f1 - mean) + np.abs(f2 - mean))
    )

    value = res_k * half
    resabs *= abs(half)
    resasc *= abs(half)
    err = abs((res_k - res_g) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > 1e-300 / (50.0 * _EPS):
        err = max(err, 50.0 * _EPS * resabs)
    return value, err


def quad(
    f: Integrand,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    limit: int = 500,
    atol: float | None = None,
) -> QuadResult:
    """Integrate ``f`` over [lo, hi] by bisecting the worst interval.

    Converges when the summed error estimate is within max(atol, tol·|value|).
    Endpoints are never evaluated, so integrable endpoint
    singularities are handled by subdivision.

    Args:
        f: Expression in t or a float callable.
        lo: Lower limit.
        hi: Upper limit; ``hi < lo`` flips the sign.
        tol: Relative tolerance; also the absolute one unless ``atol`` is given.
        atol: Absolute tolerance; 0 asks for a purely relative criterion.
        limit: Maximum number of subintervals.

    Returns:
        Value, error estimate and subinterval count.

    Raises:
        QuadratureError: No convergence within ``limit`` subintervals.
    """
    if hi == lo:
        return QuadResult(0.0, 0.0, 0)
    if hi < lo:
        r = quad(f, hi, lo, tol, limit, atol)
        return QuadResult(-r.value, r.error, r.subdivisions)
    fn = _as_callable(f)
    abs_tol = tol if atol is None else atol

    value, err = gk15(fn, lo, hi)
    heap: list[tuple[float, _Piece]] = [(-err, _Piece(lo, hi, value, err))]
    settled: list[_Piece] = []
    count = 1
    while True:
        pieces = [p for _, p in heap] + settled
        total = math.fsum(p.value for p in pieces)
        total_err = math.fsum(p.error for p in pieces)
        if total_err <= max(abs_tol, tol * abs(total)):
            return QuadResult(total, total_err, count)
        if not heap:
            # Every interval sits at its rounding floor.
            logger.warning(
                "Quadrature on [%g, %g] limited by rounding: error %.3e", lo, hi, total_err
            )
            return QuadResult(total, total_err, count)
        if count >= limit:
            raise QuadratureError(total, total_err, limit)

        _, worst = heapq.heappop(heap)
        mid = 0.5 * (worst.lo + worst.hi)
        if not worst.lo < mid < worst.hi:
            settled.append(worst)
            continue
        for a, b in ((worst.lo, mid), (mid, worst.hi)):
            v, e = gk15(fn, a, b)
            piece = _Piece(a, b, v, e)
            if e <= 50.0 * _EPS * abs(v) * 1.0001 and e > 0.0:
                settled.append(piece)
            else:
                heapq.heappush(heap, (-e, piece))
        count += 1


def cumulative(
    f: Integrand, knots: Sequence[float] | np.ndarray, tol: float = 1e-12, limit: int = 500
) -> np.ndarray:
    """∫ from knots[0] to each knot, summed segment by segment."""
    pts = np.asarray(knots, dtype=np.float64)
    out = np.zeros(pts.size)
    acc = 0.0
    for i in range(1, pts.size):
        acc += quad(f, float(pts[i - 1]), float(pts[i]), tol, limit).value
        out[i] = acc
    return out
