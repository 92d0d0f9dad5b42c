"""Trace recording and reading as CSV files."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from riccatikit.algebra.extreal import INFINITY, ExtReal
from riccatikit.errors import InputError
from riccatikit.liegroup.connect import ConnectPath
from riccatikit.solvers.trace import SolutionTrace
from riccatikit.types import Chart

TRACE_HEADER = ["t", "y", "chart"]
CURVE_HEADER = ["t", "alpha", "beta", "gamma", "delta", "det"]


def fmt(x: float, digits: int = 17) -> str:
    """A float with ``digits`` significant digits; infinities as ``inf``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits}g}"


class TraceWriter:
    """Writes solution samples to a CSV file with header ``t,y,chart``."""

    def __init__(self, path: Path, digits: int = 17) -> None:
        self._path = path
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self._path, "w", newline="")  # noqa: SIM115
        self._writer = csv.writer(self._file)
        self._writer.writerow(TRACE_HEADER)
        self._digits = digits

    def write_sample(self, t: float, y: ExtReal, chart: Chart) -> None:
        """Write one sample; Infinity is written as the literal ``inf``."""
        value = "inf" if y.is_infinite else fmt(y.value, self._digits)
        self._writer.writerow([fmt(t, self._digits), value, chart.value])

    def write_trace(self, trace: SolutionTrace) -> None:
        for t, y, c in zip(trace.times, trace.values, trace.charts, strict=True):
            self.write_sample(float(t), y, c)

    def close(self) -> None:
        """Close the trace file."""
        self._file.close()

    def __enter__(self) -> TraceWriter:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def write_trace_csv(trace: SolutionTrace, path: str | Path, digits: int = 17) -> Path:
    p = Path(path)
    with TraceWriter(p, digits) as writer:
        writer.write_trace(trace)
    return p


def read_trace_csv(path: str | Path) -> SolutionTrace:
    """Read a trace written by ``write_trace_csv``.

    Raises:
        InputError: The header or a row is malformed.
    """
    times: list[float] = []
    values: list[ExtReal] = []
    charts: list[Chart] = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != TRACE_HEADER:
            raise InputError(f"Expected header {','.join(TRACE_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                t, y, chart = row
                times.append(float(t))
                values.append(INFINITY if y.strip() in ("inf", "-inf") else ExtReal(float(y)))
                charts.append(Chart(chart))
            except ValueError as e:
                raise InputError(f"Malformed trace row {lineno}: {row}") from e
    return SolutionTrace(np.asarray(times), values, charts)


def write_curve_csv(path_data: ConnectPath, path: str | Path, digits: int = 17) -> Path:
    """Write connecting-curve states as ``t,alpha,beta,gamma,delta,det``."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    dets = path_data.dets
    with open(p, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CURVE_HEADER)
        for t, state, det in zip(path_data.times, path_data.states, dets, strict=True):
            row = [fmt(float(t), digits)]
            row.extend(fmt(float(x), digits) for x in state)
            row.append(fmt(float(det), digits))
            writer.writerow(row)
    return p
