"""Decision cascade that names the first reduction an equation admits."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from riccatikit.errors import DomainError, NotASolutionError
from riccatikit.expr.grid import Grid, constancy
from riccatikit.expr.nodes import Expr
from riccatikit.integrability.detectors import (
    LinearizationResult,
    SpecialMResult,
    ctu_profile,
    ft2_special_M,
    linearization_test,
)
from riccatikit.integrability.reductions import (
    SOLUTION_TOL,
    ReductionPlan,
    plan_for,
    solution_residual,
)
from riccatikit.riccati.equation import RiccatiEq, nonvanishing, vanishes
from riccatikit.types import CaseKind, ClassifyReport, Evidence

logger = logging.getLogger(__name__)

_NAMES = ("b0", "b1", "b2")


@dataclass
class Classification:
    """The detected case, its evidence and whatever the matching plan needs."""

    case: CaseKind
    evidence: Evidence
    constants: tuple[float, float, float] | None = None
    reference: int = 2
    linearization: LinearizationResult | None = None
    special_M: SpecialMResult | None = None
    particular: Expr | None = None

    @property
    def constant(self) -> float | None:
        return self.evidence.constant

    def report(self, plan: ReductionPlan | None = None) -> ClassifyReport:
        return ClassifyReport(
            case=self.case,
            evidence=self.evidence,
            suggested_plan=plan.describe() if plan is not None else [],
        )


def _separable(
    rows: np.ndarray, tol: float
) -> tuple[int, tuple[float, float, float], float] | None:
    """Reference coefficient and constant ratios b_i/b_ref, if all ratios are constant."""
    order = sorted(
        (r for r in (2, 0, 1) if nonvanishing(rows[r])),
        key=lambda r: -float(np.min(np.abs(rows[r]))),
    )
    if not order:
        return None
    ref = order[0]
    ratios: list[float] = []
    worst = 0.0
    for i in range(3):
        c = constancy(rows[i] / rows[ref], tol)
        if not c.ok:
            return None
        ratios.append(1.0 if i == ref else c.mean)
        worst = max(worst, c.deviation)
    return ref, (ratios[0], ratios[1], ratios[2]), worst


def classify(
    eq: RiccatiEq, grid: Grid | None = None, particular: Expr | None = None
) -> Classification:
    """Run the detectors in order and return the first hit.

    Order: b2 ≡ 0, b0 ≡ 0, constant coefficients, constant ratios, a constant
    solution, a constant invariant, the M = b1/b2 condition, then a caller
    supplied particular solution.

    Args:
        eq: Equation to classify.
        grid: Sample grid; the equation's default grid when omitted.
        particular: Optional known solution, used only if nothing else applies.

    Returns:
        The classification; ``Unclassified`` when nothing applies.
    """
    grid = grid or eq.grid()
    tol = grid.tolerance
    rows = eq.sample(grid)

    if vanishes(rows[2]):
        return Classification(
            CaseKind.LINEAR_ALREADY, Evidence(residual=float(np.max(np.abs(rows[2]))))
        )
    if vanishes(rows[0]):
        return Classification(
            CaseKind.INVERSE_LINEAR, Evidence(residual=float(np.max(np.abs(rows[0]))))
        )

    fits = [constancy(r, tol) for r in rows]
    if all(c.ok for c in fits):
        consts = (fits[0].mean, fits[1].mean, fits[2].mean)
        evidence = Evidence(
            residual=max(c.deviation for c in fits), details={"c": list(consts)}
        )
        return Classification(CaseKind.AUTONOMOUS, evidence, constants=consts)

    sep = _separable(rows, tol)
    if sep is not None:
        ref, ratios, worst = sep
        evidence = Evidence(
            residual=worst, details={"reference": _NAMES[ref], "c": list(ratios)}
        )
        return Classification(CaseKind.SEPARABLE, evidence, constants=ratios, reference=ref)

    lin = linearization_test(eq, grid)
    if lin is not None:
        evidence = Evidence(
            constant=lin.c,
            residual=lin.residual,
            details={"K": lin.K, "roots": list(lin.roots)},
        )
        return Classification(CaseKind.LINEARIZABLE_BY_CONSTANT, evidence, linearization=lin)

    try:
        c = constancy(ctu_profile(eq, grid), tol)
    except DomainError as err:
        logger.debug("CTU test skipped: %s", err)
    else:
        if c.ok:
            return Classification(
                CaseKind.CTU_INTEGRABLE, Evidence(constant=c.mean, residual=c.deviation)
            )

    try:
        special = ft2_special_M(eq, 0.0, grid)
    except DomainError as err:
        logger.debug("M = b1/b2 test skipped: %s", err)
    else:
        if special is not None:
            evidence = Evidence(residual=special.residual, details={"t_ref": special.t_ref})
            return Classification(CaseKind.FT2_SPECIAL_M, evidence, special_M=special)

    if particular is not None:
        residual = solution_residual(eq, particular, grid)
        if residual <= SOLUTION_TOL:
            return Classification(
                CaseKind.KNOWN_PARTICULAR_SOLUTION,
                Evidence(residual=residual),
                particular=particular,
            )
        raise NotASolutionError(residual, SOLUTION_TOL)

    return Classification(CaseKind.UNCLASSIFIED, Evidence())


def classify_and_plan(
    eq: RiccatiEq, grid: Grid | None = None, particular: Expr | None = None, tol: float = 1e-12
) -> tuple[Classification, ReductionPlan]:
    cls = classify(eq, grid, particular)
    return cls, plan_for(cls, eq, grid, tol)
