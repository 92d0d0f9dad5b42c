"""CLI entrypoint for riccatikit."""

from __future__ import annotations

import functools
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import TYPE_CHECKING, Any, TypeVar

import click
from rich.console import Console
from rich.logging import RichHandler

from riccatikit import __version__
from riccatikit.errors import InputError, NumericalError

if TYPE_CHECKING:
    from riccatikit.config import KitConfig
    from riccatikit.types import JobSpec

F = TypeVar("F", bound=Callable[..., Any])

EXIT_INPUT = 2
EXIT_NUMERICAL = 3

err_console = Console(stderr=True)


def _setup_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logger = logging.getLogger("riccatikit")
    logger.handlers.clear()
    logger.addHandler(RichHandler(console=err_console, show_path=False, rich_tracebacks=False))
    logger.setLevel(level)
    logger.propagate = False


def _common_options(fn: F) -> F:
    """--config and -v, shared by every subcommand."""
    fn = click.option(
        "--config", "config_path", default=None, type=click.Path(), help="YAML config path."
    )(fn)
    fn = click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG.")(fn)
    return fn


def _numeric_options(fn: F) -> F:
    """Tolerance and grid overrides."""
    fn = click.option("--rtol", default=None, type=float, help="Relative step tolerance.")(fn)
    fn = click.option("--atol", default=None, type=float, help="Absolute step tolerance.")(fn)
    fn = click.option(
        "--grid-points", default=None, type=int, help="Points of the constancy grid."
    )(fn)
    fn = click.option(
        "--tol-const", default=None, type=float, help="Constancy tolerance on the grid."
    )(fn)
    fn = click.option("--seed", default=None, type=int, help="Seed for random probes.")(fn)
    return fn


def _guarded(fn: F) -> F:
    """Map toolkit errors onto the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except InputError as e:
            err_console.print(f"[red]Input error:[/red] {e}")
            sys.exit(EXIT_INPUT)
        except NumericalError as e:
            err_console.print(f"[red]Numerical failure:[/red] {e}")
            sys.exit(EXIT_NUMERICAL)

    return wrapper  # type: ignore[return-value]


def _prepare(
    input_path: str, config_path: str | None, verbose: int, **overrides: Any
) -> tuple[JobSpec, KitConfig]:
    from riccatikit.config import load_config, merge_cli_overrides
    from riccatikit.engine.schema import load_spec

    _setup_logging(verbose)
    cfg = merge_cli_overrides(load_config(config_path), **overrides)
    return load_spec(input_path), cfg


def _emit(obj: Any, output: str | None, digits: int) -> None:
    from riccatikit.reporting.report import dumps, write_json

    if output:
        write_json(obj, output, digits)
    click.echo(dumps(obj, digits))


@click.group()
@click.version_option(version=__version__, prog_name="riccatikit")
def main() -> None:
    """riccatikit: classify, transform and solve time-dependent Riccati equations."""


@main.command("classify")
@click.option("--input", "-i", "input_path", required=True, type=click.Path(), help="Job spec.")
@click.option("--output", "-o", default=None, type=click.Path(), help="Write the report here.")
@_numeric_options
@_common_options
@_guarded
def classify(
    input_path: str,
    output: str | None,
    config_path: str | None,
    verbose: int,
    **overrides: Any,
) -> None:
    """Name the reduction the equation admits, with evidence."""
    from riccatikit.engine.runner import run_classify

    spec, cfg = _prepare(input_path, config_path, verbose, **overrides)
    _emit(run_classify(spec, cfg), output, cfg.output.digits)


@main.command("solve")
@click.option("--input", "-i", "input_path", required=True, type=click.Path(), help="Job spec.")
@click.option("--output", "-o", default=None, type=click.Path(), help="Trace CSV path.")
@_numeric_options
@_common_options
@_guarded
def solve(
    input_path: str,
    output: str | None,
    config_path: str | None,
    verbose: int,
    **overrides: Any,
) -> None:
    """Solve from y0 and print the summary; --output writes the trace CSV."""
    from riccatikit.engine.runner import run_solve
    from riccatikit.engine.trace import write_trace_csv

    spec, cfg = _prepare(input_path, config_path, verbose, **overrides)
    trace, summary = run_solve(spec, cfg)
    summary_path: str | None = None
    if output:
        out = Path(output)
        write_trace_csv(trace, out, cfg.output.digits)
        summary.trace_path = str(out)
        summary_path = str(out.with_suffix(".summary.json"))
    _emit(summary, summary_path, cfg.output.digits)


@main.command("transform")
@click.option("--input", "-i", "input_path", required=True, type=click.Path(), help="Job spec.")
@click.option("--output", "-o", default=None, type=click.Path(), help="Write the result here.")
@_numeric_options
@_common_options
@_guarded
def transform_cmd(
    input_path: str,
    output: str | None,
    config_path: str | None,
    verbose: int,
    **overrides: Any,
) -> None:
    """Apply the spec's curve and print the transformed equation."""
    from riccatikit.engine.runner import run_transform

    spec, cfg = _prepare(input_path, config_path, verbose, **overrides)
    _emit(run_transform(spec, cfg), output, cfg.output.digits)


@main.command("connect")
@click.option("--input", "-i", "input_path", required=True, type=click.Path(), help="Job spec.")
@click.option("--output", "-o", default=None, type=click.Path(), help="Curve CSV path.")
@_numeric_options
@_common_options
@_guarded
def connect(
    input_path: str,
    output: str | None,
    config_path: str | None,
    verbose: int,
    **overrides: Any,
) -> None:
    """Integrate the connecting system and report det drift."""
    from riccatikit.engine.runner import run_connect
    from riccatikit.engine.trace import write_curve_csv

    spec, cfg = _prepare(input_path, config_path, verbose, **overrides)
    path, report = run_connect(spec, cfg)
    report_path: str | None = None
    if output:
        out = Path(output)
        write_curve_csv(path, out, cfg.output.digits)
        report_path = str(out.with_suffix(".report.json"))
    _emit(report, report_path, cfg.output.digits)


@main.command("compare")
@click.option("--input", "-i", "input_path", required=True, type=click.Path(), help="Job spec.")
@click.option("--output", "-o", default=None, type=click.Path(), help="Write the report here.")
@click.option("--markdown", default=None, type=click.Path(), help="Markdown table path.")
@_numeric_options
@_common_options
@_guarded
def compare(
    input_path: str,
    output: str | None,
    markdown: str | None,
    config_path: str | None,
    verbose: int,
    **overrides: Any,
) -> None:
    """Compare the plan solution against the oracle for several initial values."""
    from riccatikit.engine.runner import run_compare
    from riccatikit.reporting.report import write_compare_markdown

    spec, cfg = _prepare(input_path, config_path, verbose, **overrides)
    report = run_compare(spec, cfg, seed=overrides.get("seed"))
    if markdown:
        write_compare_markdown(report, markdown)
    _emit(report, output, cfg.output.digits)


@main.command("fixtures")
@click.option("--output", "-o", default=None, type=click.Path(), help="Write one spec per fixture.")
@click.option("--show", default=None, help="Print the spec of one fixture.")
@click.option("--case", "case", default=None, help="Filter by expected case.")
@_common_options
@_guarded
def fixtures(
    output: str | None,
    show: str | None,
    case: str | None,
    config_path: str | None,
    verbose: int,
) -> None:
    """List the named fixture equations or write them as spec files."""
    from riccatikit.config import load_config
    from riccatikit.integrability.fixtures.registry import get_registry
    from riccatikit.reporting.report import dumps, write_json

    _setup_logging(verbose)
    digits = load_config(config_path).output.digits
    registry = get_registry()

    if show:
        try:
            fixture = registry.get_fixture(show)
        except KeyError as e:
            raise InputError(str(e.args[0])) from e
        click.echo(dumps(fixture.build().spec(), digits))
        return

    infos = registry.list_fixtures(case=case)
    if output:
        out_dir = Path(output)
        for info in infos:
            spec = registry.get_fixture(info.id).build().spec()
            write_json(spec, out_dir / f"{info.id}.json", digits)
        err_console.print(f"[green]Wrote {len(infos)} fixture specs to {out_dir}[/green]")
        return

    if not infos:
        click.echo("No fixtures found.")
        return
    current = None
    for info in infos:
        if info.case.value != current:
            current = info.case.value
            click.echo(f"\n[{current}]")
        click.echo(f"  {info.id:<24} {info.name}")
        if info.description:
            click.echo(f"    {info.description}")
