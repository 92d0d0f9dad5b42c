"""Report writers: JSON with fixed float precision, CSV and markdown tables."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from riccatikit.types import CompareReport


def _number(x: float, digits: int) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.{digits}g}"


def dumps(obj: Any, digits: int = 17, indent: int = 2, _level: int = 0) -> str:
    """JSON text in which every float carries ``digits`` significant digits.

    Non-finite floats become ``"inf"``/``"-inf"``, NaN becomes ``null``.
    """
    if isinstance(obj, BaseModel):
        obj = obj.model_dump(mode="python")
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _number(obj, digits)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k))}: {dumps(v, digits, indent, _level + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list | tuple):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, digits, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "value"):
        # StrEnum members and similar wrappers
        return dumps(obj.value, digits, indent, _level)
    return json.dumps(str(obj))


def write_json(obj: Any, path: str | Path, digits: int = 17) -> Path:
    """Write a report (model or plain data) as formatted JSON."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w") as f:
        f.write(dumps(obj, digits) + "\n")
    return p


def write_compare_csv(report: CompareReport, path: str | Path, digits: int = 17) -> Path:
    """Write per-probe errors as a flat CSV table."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["y0", "sup_error", "pole_passages", "failed"])
        for probe in report.probes:
            writer.writerow([
                probe.y0,
                f"{probe.sup_error:.{digits}g}",
                probe.pole_passages,
                probe.failed or "",
            ])
    return p


def compare_markdown(report: CompareReport) -> str:
    """A human-readable markdown table of sup-errors per initial condition."""
    lines: list[str] = []
    title = report.name or "equation"
    lines.append(f"# Comparison: {title}")
    lines.append("")
    lines.append(f"**Case:** {report.case.value}")
    lines.append(f"**Method:** {report.method.value}")
    lines.append(f"**Seed:** {report.seed}")
    lines.append("")
    lines.append("| y0 | Sup error (chordal) | Pole passages | Status |")
    lines.append("|----|---------------------|---------------|--------|")
    for probe in report.probes:
        status = f"failed: {probe.failed}" if probe.failed else "ok"
        err = "N/A" if probe.failed else f"{probe.sup_error:.3e}"
        lines.append(f"| {probe.y0} | {err} | {probe.pole_passages} | {status} |")
    lines.append("")

    if report.stats:
        lines.append("## Summary")
        lines.append("")
        lines.append("| Statistic | Value |")
        lines.append("|-----------|-------|")
        for name, value in report.stats.items():
            lines.append(f"| {name} | {value:.4g} |")
        lines.append("")
    return "\n".join(lines)


def write_compare_markdown(report: CompareReport, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w") as f:
        f.write(compare_markdown(report))
    return p
