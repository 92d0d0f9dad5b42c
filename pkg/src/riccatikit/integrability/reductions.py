"""Chains of variable changes that end in an equation solvable in closed form.

A ``ReductionPlan`` records each change together with the equation it
produces and knows how to push an initial value forward, solve the final
equation and pull the solution back to the source variable.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from riccatikit.algebra.curves import AnalyticCurve, ConstantCurve, SL2Curve
from riccatikit.algebra.extreal import INFINITY, ExtReal, parse_ext
from riccatikit.algebra.hermite import HermiteTable
from riccatikit.algebra.sl2 import SL2, mobius
from riccatikit.config import StepControl
from riccatikit.errors import (
    CoincidentSolutionsError,
    GridMismatchError,
    InputError,
    NotASolutionError,
)
from riccatikit.expr import sqrt
from riccatikit.expr.grid import Grid
from riccatikit.expr.nodes import Closure, Diff, Expr, Num
from riccatikit.riccati.equation import RiccatiEq, TargetForm
from riccatikit.riccati.transform import push_solution
from riccatikit.solvers.autonomous import solve_autonomous
from riccatikit.solvers.linear import LinearEq, output_times, solve_linear
from riccatikit.solvers.oracle import oracle_integrate
from riccatikit.solvers.trace import SolutionTrace
from riccatikit.types import CaseKind, Method, StepTag

if TYPE_CHECKING:
    from riccatikit.integrability.classification import Classification

logger = logging.getLogger(__name__)

# Residual bound for caller-supplied particular solutions.
SOLUTION_TOL = 1e-6

Executor = Callable[[ExtReal, np.ndarray, StepControl], SolutionTrace]
StepResult = RiccatiEq | TargetForm | LinearEq | None

INVERSION = SL2(0.0, -1.0, 1.0, 0.0)


@dataclass(frozen=True)
class ReductionStep:
    """One change of variables and the equation it leads to."""

    tag: StepTag
    result: StepResult
    curve: SL2Curve | None = None
    note: str = ""

    def describe(self) -> str:
        target = type(self.result).__name__ if self.result is not None else "solution"
        text = f"{self.tag.value} -> {target}"
        return f"{text} ({self.note})" if self.note else text


@dataclass
class ReductionPlan:
    """Ordered variable changes plus the routine that solves the last equation.

    Args:
        source: Equation the plan starts from.
        method: Method name recorded on produced traces.
        steps: The changes, in the order they are applied.
        executor: Maps (y0, output times, step control) to a trace of y.
    """

    source: RiccatiEq
    method: Method
    steps: list[ReductionStep]
    executor: Executor = field(repr=False)

    def execute(
        self,
        y0: float | str | ExtReal,
        t_span: tuple[float, float],
        t_eval: Sequence[float] | int | None = None,
        step: StepControl | None = None,
    ) -> SolutionTrace:
        """Solve the source equation from y(t_span[0]) = y0 along the plan."""
        start = y0 if isinstance(y0, ExtReal) else parse_ext(y0)
        times = output_times(t_span, t_eval)
        trace = self.executor(start, times, step or StepControl())
        trace.meta["method"] = self.method.value
        trace.meta["steps"] = self.describe()
        return trace

    def describe(self) -> list[str]:
        return [s.describe() for s in self.steps]


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def expr_trace(e: Expr, times: np.ndarray) -> SolutionTrace:
    return SolutionTrace(times.copy(), [ExtReal(e.eval(float(t))) for t in times])


def _pull_back(curve: SL2Curve, trace: SolutionTrace) -> SolutionTrace:
    return push_solution(curve.inverse(), trace)


def _through_curve(curve: SL2Curve, inner: Executor, fixed: Expr | None = None) -> Executor:
    """Push y0 through ``curve``, run ``inner`` and pull the result back.

    When the pushed value is infinite and ``fixed`` is given, the solution is
    that expression itself.
    """

    def run(y0: ExtReal, times: np.ndarray, control: StepControl) -> SolutionTrace:
        z0 = mobius(curve.at(float(times[0])), y0)
        if z0.is_infinite and fixed is not None:
            return expr_trace(fixed, times)
        return _pull_back(curve, inner(z0, times, control))

    return run


def _linear_executor(linear: LinearEq, tol: float) -> Executor:
    def run(y0: ExtReal, times: np.ndarray, control: StepControl) -> SolutionTrace:
        if y0.is_infinite:
            return SolutionTrace.constant(times, INFINITY)
        return solve_linear(linear, y0, (float(times[0]), float(times[-1])), times, tol)

    return run


def _autonomous_executor(target: TargetForm, tol: float) -> Executor:
    def run(y0: ExtReal, times: np.ndarray, control: StepControl) -> SolutionTrace:
        span = (float(times[0]), float(times[-1]))
        return solve_autonomous(*target.c, target.D, y0, span, times, tol, control)

    return run


def oracle_executor(eq: RiccatiEq) -> Executor:
    def run(y0: ExtReal, times: np.ndarray, control: StepControl) -> SolutionTrace:
        return oracle_integrate(eq, y0, (float(times[0]), float(times[-1])), control, times)

    return run


# ---------------------------------------------------------------------------
# Particular solutions
# ---------------------------------------------------------------------------

def solution_residual(eq: RiccatiEq, y1: Expr, grid: Grid | None = None) -> float:
    """max |ẏ1 − (b0 + b1·y1 + b2·y1²)| / max(1, |ẏ1|) on the grid."""
    grid = grid or eq.grid()
    worst = 0.0
    dy1 = Diff(y1)
    for t in grid.points:
        t = float(t)
        d = dy1.eval(t)
        worst = max(worst, abs(d - eq.rhs(t, y1.eval(t))) / max(1.0, abs(d)))
    return worst


def trace_as_expr(eq: RiccatiEq, trace: SolutionTrace) -> Closure:
    """A finite solution trace as an expression with the equation as its derivative.

    Raises:
        NotASolutionError: The trace departs from the oracle started at its
            first sample by more than the solution tolerance.
    """
    values = trace.as_array()
    if not np.all(np.isfinite(values)):
        raise InputError("A particular solution trace must stay finite")
    ref = oracle_integrate(eq, trace.y0, (trace.t0, float(trace.times[-1])), t_eval=trace.times)
    ref = _resample(ref, trace.times)
    err = trace.sup_abs(ref, cap=math.inf)
    if err > SOLUTION_TOL:
        raise NotASolutionError(err, SOLUTION_TOL)
    slopes = np.array(
        [eq.rhs(float(t), float(v)) for t, v in zip(trace.times, values, strict=True)]
    )
    table = HermiteTable(trace.times, values, slopes)
    value_only = table.closure(label="particular (table)")
    b0, b1, b2 = eq.coefficients
    return Closure(
        table.evaluate,
        derivative=b0 + b1 * value_only + b2 * value_only * value_only,
        label="particular",
    )


def _resample(trace: SolutionTrace, times: np.ndarray) -> SolutionTrace:
    """Drop inserted pole samples so the trace lands on ``times`` again."""
    if len(trace) == times.size:
        return trace
    keep = np.flatnonzero(np.isin(trace.times, times))
    return SolutionTrace(trace.times[keep], [trace.values[i] for i in keep])


def _as_solution(
    eq: RiccatiEq, y1: Expr | SolutionTrace, grid: Grid | None
) -> Expr:
    if isinstance(y1, SolutionTrace):
        return trace_as_expr(eq, y1)
    residual = solution_residual(eq, y1, grid)
    if residual > SOLUTION_TOL:
        raise NotASolutionError(residual, SOLUTION_TOL)
    return y1


def _scaled(k: float, e: Expr) -> Expr:
    if isinstance(e, Num):
        return Num(k * e.value)
    return e if k == 1.0 else k * e


def reduce_one_solution(
    eq: RiccatiEq,
    y1: Expr | SolutionTrace,
    grid: Grid | None = None,
    tol: float = 1e-12,
) -> ReductionPlan:
    """Two quadratures from one particular solution.

    y = y1 + z turns the equation into a Bernoulli equation for z, and
    u = −1/z into u̇ = b2 − (b1 + 2·b2·y1)·u, which is linear.

    Args:
        eq: Source equation.
        y1: Particular solution, as an expression or a finite trace.
        grid: Grid for the residual check.
        tol: Quadrature tolerance for the linear solve.

    Raises:
        NotASolutionError: ``y1`` does not solve ``eq``.
    """
    y1 = _as_solution(eq, y1, grid)
    b0, b1, b2 = eq.coefficients
    if isinstance(y1, Num):
        shift = b1 if y1.value == 0.0 else b1 + _scaled(2.0 * y1.value, b2)
    else:
        shift = b1 + 2.0 * b2 * y1
    bernoulli = RiccatiEq(Num(0.0), shift, b2, eq.domain, check=False)
    linear = LinearEq(b2, -shift, eq.domain)

    shift_curve = AnalyticCurve(Num(1.0), -y1, Num(0.0), Num(1.0), eq.domain, check=False)
    # u = −1/(y − y1)
    combined = AnalyticCurve(Num(0.0), Num(-1.0), Num(1.0), -y1, eq.domain, check=False)
    steps = [
        ReductionStep(StepTag.SHIFT_BY_SOLUTION, bernoulli, shift_curve, "z = y - y1"),
        ReductionStep(StepTag.INVERT, linear, ConstantCurve(INVERSION), "u = -1/z"),
    ]
    executor = _through_curve(combined, _linear_executor(linear, tol), fixed=y1)
    return ReductionPlan(eq, Method.PARTICULAR, steps, executor)


def _difference_sign(d: np.ndarray, grid: Grid) -> float:
    scale = max(1.0, float(np.max(np.abs(d))))
    small = np.abs(d) <= 1e-12 * scale
    if np.any(small) or not (np.all(d > 0.0) or np.all(d < 0.0)):
        i = int(np.argmin(np.abs(d)))
        raise CoincidentSolutionsError(float(grid.points[i]))
    return 1.0 if d[0] > 0.0 else -1.0


def reduce_two_solutions(
    eq: RiccatiEq,
    y1: Expr | SolutionTrace,
    y2: Expr | SolutionTrace,
    grid: Grid | None = None,
    tol: float = 1e-12,
) -> ReductionPlan:
    """One quadrature from two particular solutions.

    z = (y − y1)/(y − y2) satisfies ż = b2·(y1 − y2)·z. When y1 < y2 the
    sign-flipped chart −z is used so the change stays in SL(2,R).

    Raises:
        NotASolutionError: ``y1`` or ``y2`` does not solve ``eq``.
        CoincidentSolutionsError: y1 and y2 meet on the grid.
    """
    grid = grid or eq.grid()
    y1 = _as_solution(eq, y1, grid)
    y2 = _as_solution(eq, y2, grid)
    diff = grid.sample(y1 - y2)
    sigma = _difference_sign(diff, grid)

    s = sqrt(sigma * (y1 - y2))
    if sigma > 0.0:
        curve = AnalyticCurve(1.0 / s, -y1 / s, 1.0 / s, -y2 / s, eq.domain, check=False)
    else:
        curve = AnalyticCurve(-1.0 / s, y1 / s, 1.0 / s, -y2 / s, eq.domain, check=False)
    linear = LinearEq(Num(0.0), eq.b2 * (y1 - y2), eq.domain)
    note = "z = (y - y1)/(y - y2)" if sigma > 0.0 else "z = (y1 - y)/(y - y2)"
    steps = [ReductionStep(StepTag.CROSS_RATIO, linear, curve, note)]
    executor = _through_curve(curve, _linear_executor(linear, tol), fixed=y2)
    return ReductionPlan(eq, Method.PARTICULAR, steps, executor)


# ---------------------------------------------------------------------------
# Superposition
# ---------------------------------------------------------------------------

def _superpose(a: ExtReal, b: ExtReal, c: ExtReal, k: float) -> ExtReal:
    """(y1·(y3 − y2) − k·y2·(y1 − y3)) / ((y3 − y2) − k·(y1 − y3)) with limits."""
    if a.is_infinite:
        return INFINITY if k == 0.0 else ExtReal((k * b.value + b.value - c.value) / k)
    if b.is_infinite:
        return ExtReal(a.value + k * (a.value - c.value))
    if c.is_infinite:
        return INFINITY if k == -1.0 else ExtReal((a.value + k * b.value) / (1.0 + k))
    y1, y2, y3 = a.value, b.value, c.value
    if y2 == y3:
        # The k-terms share the factor (y1 − y3); the quotient is y2 wherever it is defined.
        return ExtReal(y2)
    num = y1 * (y3 - y2) - k * y2 * (y1 - y3)
    den = (y3 - y2) - k * (y1 - y3)
    scale = abs(y3) + abs(y2) + abs(k) * (abs(y1) + abs(y3))
    if den == 0.0 or abs(den) <= 1e-14 * scale:
        if abs(num) <= 1e-14 * scale * max(1.0, abs(y2)):
            # All three samples agree to rounding.
            return ExtReal(y2)
        return INFINITY
    return ExtReal(num / den)


def superposition(
    y1: SolutionTrace,
    y2: SolutionTrace,
    y3: SolutionTrace,
    k: float,
    k_infinite: bool = False,
) -> SolutionTrace:
    """The solution with cross-ratio parameter k built from three solutions.

    k = 0 returns y1 and the limit k → ∞ (``k_infinite``) returns y2.

    Raises:
        GridMismatchError: The traces are not sampled on the same times.
    """
    for other in (y2, y3):
        if len(other) != len(y1) or not np.allclose(other.times, y1.times, rtol=1e-12, atol=1e-12):
            raise GridMismatchError("Superposition needs traces on one time grid")
    if k_infinite:
        return SolutionTrace(y1.times.copy(), list(y2.values), meta={"method": "superposition"})
    if k == 0.0:
        out = SolutionTrace(y1.times.copy(), list(y1.values), meta={"method": "superposition"})
        out.pole_times = list(y1.pole_times)
        return out
    values = [
        _superpose(a, b, c, float(k))
        for a, b, c in zip(y1.values, y2.values, y3.values, strict=True)
    ]
    out = SolutionTrace(y1.times.copy(), values, meta={"method": "superposition", "k": k})
    out.pole_times = [float(t) for t, v in zip(out.times, values, strict=True) if v.is_infinite]
    return out


# ---------------------------------------------------------------------------
# Plans per classification
# ---------------------------------------------------------------------------

def plan_for(
    classification: Classification,
    eq: RiccatiEq,
    grid: Grid | None = None,
    tol: float = 1e-12,
) -> ReductionPlan:
    """The plan matching a classification; Unclassified gets the oracle."""
    from riccatikit.integrability.detectors import tu_transform

    case = classification.case
    b0, b1, b2 = eq.coefficients

    if case is CaseKind.LINEAR_ALREADY:
        linear = LinearEq(b0, b1, eq.domain)
        steps = [ReductionStep(StepTag.CONSTANT_CURVE, linear, note="b2 = 0")]
        return ReductionPlan(eq, Method.QUADRATURES, steps, _linear_executor(linear, tol))

    if case is CaseKind.INVERSE_LINEAR:
        linear = LinearEq(b2, -b1 if not isinstance(b1, Num) else Num(-b1.value), eq.domain)
        curve = ConstantCurve(INVERSION, eq.domain)
        steps = [ReductionStep(StepTag.INVERT, linear, curve, "w = -1/y")]
        executor = _through_curve(curve, _linear_executor(linear, tol), fixed=Num(0.0))
        return ReductionPlan(eq, Method.QUADRATURES, steps, executor)

    if case in (CaseKind.AUTONOMOUS, CaseKind.SEPARABLE):
        c0, c1, c2 = classification.constants or (0.0, 0.0, 0.0)
        D = Num(1.0) if case is CaseKind.AUTONOMOUS else eq.coefficients[classification.reference]
        target = TargetForm(D, c0, c1, c2)
        steps = [ReductionStep(StepTag.TIME_REPARAM, target, note="tau = int D dt")]
        return ReductionPlan(eq, Method.AUTONOMOUS, steps, _autonomous_executor(target, tol))

    if case is CaseKind.LINEARIZABLE_BY_CONSTANT and classification.linearization is not None:
        lin = classification.linearization
        curve = ConstantCurve(lin.curve, eq.domain)
        note = f"sends y = {lin.c:.17g} to inf"
        steps = [ReductionStep(StepTag.CONSTANT_CURVE, lin.linear, curve, note)]
        executor = _through_curve(curve, _linear_executor(lin.linear, tol), fixed=Num(lin.c))
        return ReductionPlan(eq, Method.PARTICULAR, steps, executor)

    if case is CaseKind.CTU_INTEGRABLE and classification.constant is not None:
        rows = eq.sample(grid or eq.grid())
        c0 = 1.0 if rows[0][0] > 0.0 else -1.0
        c2 = 1.0 if rows[2][0] > 0.0 else -1.0
        found = tu_transform(eq, c0, classification.constant, c2, grid)
        if found is not None:
            steps = [ReductionStep(StepTag.SCALE, found.target, found.curve, "y' = G*y")]
            executor = _through_curve(found.curve, _autonomous_executor(found.target, tol))
            return ReductionPlan(eq, Method.CTU, steps, executor)
        logger.warning("CTU constant found but the scaling check failed; using the oracle")

    if case is CaseKind.FT2_SPECIAL_M and classification.special_M is not None:
        special = classification.special_M
        rows = eq.sample(grid or eq.grid())
        c2 = 1.0 if rows[2][0] > 0.0 else -1.0
        G = b2 / (c2 * special.D)
        root = sqrt(G)
        curve = AnalyticCurve(root, special.M * root, Num(0.0), 1.0 / root, eq.domain, False)
        target = TargetForm(special.D, 0.0, 0.0, c2)
        steps = [ReductionStep(StepTag.SCALE, target, curve, "y' = G*(y + b1/b2)")]
        executor = _through_curve(curve, _autonomous_executor(target, tol))
        return ReductionPlan(eq, Method.FT2_SPECIAL_M, steps, executor)

    if case is CaseKind.KNOWN_PARTICULAR_SOLUTION and classification.particular is not None:
        return reduce_one_solution(eq, classification.particular, grid, tol)

    return ReductionPlan(eq, Method.ORACLE, [], oracle_executor(eq))
