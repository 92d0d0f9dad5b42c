"""Second-order linear equations solved through their Riccati form.

The equation ÿ + 2P·ẏ + (Ṗ + P² − φ̇ − φ²)·y = 0 is invariant under y ↦ λ·y.

With y = e^z, ψ = ż obeys

    ψ̇ = −ψ² − 2P·ψ − (Ṗ + P² − φ̇ − φ²),

which has the particular solution ψ = φ − P.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from riccatikit.algebra.curves import Domain
from riccatikit.algebra.extreal import ExtReal
from riccatikit.config import StepControl
from riccatikit.errors import DomainError, InputError
from riccatikit.expr.nodes import Diff, Expr, Num
from riccatikit.integrability.reductions import reduce_one_solution
from riccatikit.riccati.equation import RiccatiEq
from riccatikit.solvers.trace import SolutionTrace

logger = logging.getLogger(__name__)


def second_order_to_riccati(P: Expr, phi: Expr, domain: Domain) -> tuple[RiccatiEq, Expr]:
    """The Riccati equation for ψ = ẏ/y and its particular solution φ − P."""
    free = Diff(P) + P * P - Diff(phi) - phi * phi
    b1 = Num(-2.0 * P.value) if isinstance(P, Num) else -2.0 * P
    eq = RiccatiEq(-free, b1, Num(-1.0), domain, check=False)
    return eq, phi - P


def _hermite_integral(times: np.ndarray, values: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Cumulative integral of the cubic Hermite interpolant through the samples."""
    h = np.diff(times)
    pieces = 0.5 * h * (values[:-1] + values[1:]) + h * h * (slopes[:-1] - slopes[1:]) / 12.0
    return np.concatenate([[0.0], np.cumsum(pieces)])


def second_order_solve(
    P: Expr,
    phi: Expr,
    y0: float,
    dy0: float,
    t_span: tuple[float, float],
    domain: Domain | None = None,
    t_eval: Sequence[float] | int | None = None,
    step: StepControl | None = None,
) -> SolutionTrace:
    """Solve the second-order equation from y(t0) = y0, ẏ(t0) = dy0.

    Runs the reduction on ψ = ẏ/y and returns y = y0·exp(∫ψ).

    Raises:
        InputError: y0 is zero, so ψ is undefined at the start.
        DomainError: ψ passes through infinity, i.e. y reaches zero.
    """
    if y0 == 0.0:
        raise InputError("y0 must be non-zero")
    eq, particular = second_order_to_riccati(P, phi, domain or (t_span[0], t_span[1]))
    plan = reduce_one_solution(eq, particular)
    psi = plan.execute(ExtReal(dy0 / y0), t_span, t_eval, step)
    for t, v in zip(psi.times, psi.values, strict=True):
        if v.is_infinite:
            raise DomainError("y vanishes", t=float(t))
    values = psi.as_array()
    slopes = np.array(
        [eq.rhs(float(t), float(v)) for t, v in zip(psi.times, values, strict=True)]
    )
    logs = _hermite_integral(psi.times, values, slopes)
    try:
        ys = [ExtReal(y0 * math.exp(float(s))) for s in logs]
    except OverflowError as err:
        raise DomainError("y overflows", t=float(psi.times[-1])) from err
    logger.debug("second_order_solve: %d samples", len(ys))
    return SolutionTrace(
        psi.times.copy(),
        ys,
        meta={"method": psi.meta.get("method"), "psi": values.tolist()},
    )
