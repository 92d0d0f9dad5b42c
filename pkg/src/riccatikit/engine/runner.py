"""Job pipelines behind the CLI subcommands."""

from __future__ import annotations

import logging
import math

import numpy as np
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from riccatikit.algebra.extreal import ExtReal, parse_ext
from riccatikit.algebra.sl2 import mobius
from riccatikit.config import KitConfig, OracleConfig, StepControl
from riccatikit.engine.schema import build_curve, build_equation, build_target
from riccatikit.errors import InputError, NumericalError
from riccatikit.expr import parse
from riccatikit.expr.grid import Grid
from riccatikit.expr.nodes import Expr
from riccatikit.integrability.classification import classify_and_plan
from riccatikit.integrability.reductions import ReductionPlan
from riccatikit.liegroup.connect import ConnectPath, solve_connect
from riccatikit.reporting.stats import error_stats, probe_values
from riccatikit.riccati.equation import RiccatiEq
from riccatikit.riccati.transform import push_solution, transform, transform_on_grid
from riccatikit.solvers.oracle import oracle_integrate
from riccatikit.solvers.trace import ABS_COMPARE_CAP, SolutionTrace
from riccatikit.types import (
    ClassifyReport,
    CompareReport,
    ConnectReport,
    EquationSpec,
    JobSpec,
    Method,
    ProbeResult,
    SolveSummary,
    TransformReport,
)

logger = logging.getLogger(__name__)

console = Console(stderr=True)

# Drift of det x above this is reported as a warning.
DET_DRIFT_WARN = 1e-9


def _grid(eq: RiccatiEq, config: KitConfig) -> Grid:
    g = config.grid
    return eq.grid(g.points, g.tolerance, g.kind)


def _span(spec: JobSpec, eq: RiccatiEq) -> tuple[float, float]:
    return spec.t_span if spec.t_span is not None else eq.domain


def _particular(spec: JobSpec) -> Expr | None:
    if spec.particular is None:
        return None
    return parse(spec.particular, spec.equation.params)


def _reference_oracle(config: KitConfig) -> OracleConfig:
    """Oracle settings for cross-checks: no inserted pole samples, so grids line up."""
    return config.oracle.model_copy(update={"record_poles": False})


def _plan(spec: JobSpec, config: KitConfig) -> tuple[RiccatiEq, ClassifyReport, ReductionPlan]:
    eq = build_equation(spec.equation)
    cls, plan = classify_and_plan(eq, _grid(eq, config), _particular(spec), config.quadrature.tol)
    logger.debug("classified as %s; plan: %s", cls.case.value, plan.describe())
    return eq, cls.report(plan), plan


def midpoint_defect(eq: RiccatiEq, trace: SolutionTrace, cap: float = ABS_COMPARE_CAP) -> float:
    """Largest relative defect of the cubic Hermite interpolant at step midpoints.

    Steps with an endpoint above ``cap`` or at Infinity are skipped.
    """
    worst = 0.0
    values = trace.as_array()
    for i in range(len(trace) - 1):
        t0, t1 = float(trace.times[i]), float(trace.times[i + 1])
        u0, u1 = float(values[i]), float(values[i + 1])
        if not (abs(u0) <= cap and abs(u1) <= cap):
            continue
        h = t1 - t0
        f0, f1 = eq.rhs(t0, u0), eq.rhs(t1, u1)
        um = 0.5 * (u0 + u1) + h * (f0 - f1) / 8.0
        dm = 1.5 * (u1 - u0) / h - 0.25 * (f0 + f1)
        fm = eq.rhs(t0 + 0.5 * h, um)
        worst = max(worst, abs(dm - fm) / (1.0 + abs(fm)))
    return worst


def _execute(
    eq: RiccatiEq,
    plan: ReductionPlan,
    y0: ExtReal,
    span: tuple[float, float],
    t_eval: int,
    config: KitConfig,
) -> SolutionTrace:
    """Run the plan; on a numerical failure fall back to the oracle."""
    if plan.method is not Method.ORACLE:
        try:
            return plan.execute(y0, span, t_eval, config.step)
        except NumericalError as err:
            logger.warning("%s failed (%s); falling back to the oracle", plan.method.value, err)
    trace = oracle_integrate(eq, y0, span, config.step, t_eval, config.oracle)
    trace.meta["method"] = Method.ORACLE.value
    return trace


def _cross_check(
    eq: RiccatiEq, trace: SolutionTrace, y0: ExtReal, config: KitConfig, tighten: bool
) -> tuple[float, SolutionTrace]:
    """Sup chordal distance between ``trace`` and an oracle run on the same times."""
    step: StepControl = config.step
    if tighten:
        step = step.model_copy(update={"rtol": step.rtol * 1e-2, "atol": step.atol * 1e-2})
    span = (float(trace.times[0]), float(trace.times[-1]))
    reference = oracle_integrate(eq, y0, span, step, trace.times, _reference_oracle(config))
    return trace.sup_chordal(reference), reference


# ---------------------------------------------------------------------------
# Jobs
# ---------------------------------------------------------------------------

def run_classify(spec: JobSpec, config: KitConfig) -> ClassifyReport:
    """Classify the spec's equation and describe the matching plan."""
    _, report, _ = _plan(spec, config)
    return report


def run_solve(spec: JobSpec, config: KitConfig) -> tuple[SolutionTrace, SolveSummary]:
    """Solve from ``y0`` along the plan and cross-check against the oracle.

    Raises:
        InputError: The spec has no ``y0``.
        NumericalError: The oracle itself failed.
    """
    if spec.y0 is None:
        raise InputError("solve needs 'y0'")
    eq, report, plan = _plan(spec, config)
    y0 = parse_ext(spec.y0)
    span = _span(spec, eq)
    trace = _execute(eq, plan, y0, span, spec.t_eval, config)
    if config.oracle.record_poles:
        trace = trace.with_pole_samples()
    method = Method(trace.meta.get("method", Method.ORACLE.value))

    oracle_error: float | None = None
    if method is not Method.ORACLE:
        oracle_error, _ = _cross_check(eq, trace, y0, config, tighten=False)
    max_defect = trace.residual if trace.residual is not None else midpoint_defect(eq, trace)
    poles = trace.pole_times or [
        float(t) for t, v in zip(trace.times, trace.values, strict=True) if v.is_infinite
    ]
    summary = SolveSummary(
        method=method,
        case=report.case,
        points=len(trace),
        max_defect=max_defect,
        oracle_error=oracle_error,
        pole_times=poles,
        chart_switches=len(trace.switches),
    )
    logger.info("solve: %s, %d points, oracle error %s", method.value, len(trace), oracle_error)
    return trace, summary


def run_transform(spec: JobSpec, config: KitConfig) -> TransformReport:
    """Transform the equation by the spec's curve and check the result on a grid."""
    if spec.curve is None:
        raise InputError("transform needs 'curve'")
    eq = build_equation(spec.equation)
    curve = build_curve(spec.curve, eq.domain)
    out = transform(eq, curve)
    b0, b1, b2 = out.render()
    grid = _grid(out, config)
    direct = transform_on_grid(eq, curve, grid)
    scale = max(1.0, float(np.max(np.abs(direct))))
    residual = float(np.max(np.abs(out.sample(grid) - direct))) / scale
    return TransformReport(
        equation=EquationSpec(
            b0=b0,
            b1=b1,
            b2=b2,
            params={**spec.equation.params, **spec.curve.params},
            domain=out.domain,
        ),
        curve=spec.curve.kind,
        grid_residual=residual,
    )


def run_connect(spec: JobSpec, config: KitConfig) -> tuple[ConnectPath, ConnectReport]:
    """Integrate the connecting system from ``x0`` towards the spec's target.

    With ``y0`` in the spec and det x0 > 0, the report also carries the sup
    chordal distance between pushed source solutions and target solutions.
    """
    if spec.target is None:
        raise InputError("connect needs 'target'")
    eq = build_equation(spec.equation)
    target = build_target(spec.target, spec.equation)
    span = _span(spec, eq)
    path = solve_connect(eq, target, spec.x0, span, config.step, spec.t_eval)
    det0 = float(path.dets[0])
    if path.max_det_drift > DET_DRIFT_WARN * max(1.0, abs(det0)):
        logger.warning("det drift %.3e exceeds %.1e", path.max_det_drift, DET_DRIFT_WARN)

    mapping: float | None = None
    if spec.y0 is not None and det0 > 0.0:
        curve = path.as_curve()
        y0 = parse_ext(spec.y0)
        ref = _reference_oracle(config)
        source = oracle_integrate(eq, y0, span, config.step, path.times, ref)
        z0 = mobius(curve.at(span[0]), y0)
        image = oracle_integrate(target, z0, span, config.step, path.times, ref)
        mapping = push_solution(curve, source).sup_chordal(image)

    report = ConnectReport(
        knots=len(path),
        det_initial=det0,
        max_det_drift=path.max_det_drift,
        max_offdiagonal=path.max_offdiagonal,
        mapping_residual=mapping,
        steps=int(path.meta.get("stats", {}).get("accepted", 0)),
    )
    return path, report


def run_compare(spec: JobSpec, config: KitConfig, seed: int | None = None) -> CompareReport:
    """Plan solution against the oracle for every probe initial value.

    Probes are the spec's ``y0_list``; without one they are drawn from the
    seed (CLI flag, then the spec's ``seed``, then the config).
    """
    eq, report, plan = _plan(spec, config)
    span = _span(spec, eq)
    used_seed = seed if seed is not None else (
        spec.seed if spec.seed is not None else config.compare.seed
    )
    probes: list[float | str] = list(spec.y0_list) or list(
        probe_values(config.compare.probes, used_seed, config.compare.probe_range)
    )
    results: list[ProbeResult] = []

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task(f"Comparing {spec.name or 'equation'}...", total=len(probes))
        for raw in probes:
            y0 = parse_ext(raw)
            try:
                trace = _execute(eq, plan, y0, span, spec.t_eval, config)
                tighten = trace.meta.get("method") == Method.ORACLE.value
                err, reference = _cross_check(eq, trace, y0, config, tighten)
                results.append(
                    ProbeResult(y0=str(y0), sup_error=err, pole_passages=len(reference.pole_times))
                )
            except NumericalError as e:
                logger.warning("probe y0=%s failed: %s", y0, e)
                results.append(ProbeResult(y0=str(y0), sup_error=math.nan, failed=str(e)))
            progress.advance(task)

    return CompareReport(
        name=spec.name,
        method=plan.method,
        case=report.case,
        seed=used_seed,
        probes=results,
        stats=error_stats([p.sup_error for p in results]),
    )
