"""Sampled solutions on the compactified line."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from riccatikit.algebra.extreal import INFINITY, ExtReal, chordal_distance
from riccatikit.errors import GridMismatchError, InputError
from riccatikit.types import Chart

# Samples above this magnitude are left out of plain absolute-error comparisons.
ABS_COMPARE_CAP = 1e3


@dataclass(frozen=True)
class ChartSwitch:
    """The oracle changed coordinates at ``t``."""

    t: float
    before: Chart
    value_before: float
    value_after: float


@dataclass
class SolutionTrace:
    """Solution samples y(tᵢ) with the chart each sample was computed in.

    Args:
        times: Strictly increasing sample times.
        values: One extended real per time.
        charts: Per-sample chart tag; all ``direct`` when omitted.
        residual: Optional max defect reported by the producer.
    """

    times: np.ndarray
    values: list[ExtReal]
    charts: list[Chart] = field(default_factory=list)
    residual: float | None = None
    pole_times: list[float] = field(default_factory=list)
    switches: list[ChartSwitch] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = [v if isinstance(v, ExtReal) else ExtReal(float(v)) for v in self.values]
        if self.times.ndim != 1 or self.times.size != len(self.values):
            raise InputError("A trace needs exactly one value per time")
        if np.any(np.diff(self.times) <= 0.0):
            raise InputError("Trace times must be strictly increasing")
        if not self.charts:
            self.charts = [Chart.DIRECT] * len(self.values)
        elif len(self.charts) != len(self.values):
            raise InputError("A trace needs exactly one chart tag per time")

    @classmethod
    def constant(cls, times: Sequence[float], value: ExtReal) -> SolutionTrace:
        return cls(np.asarray(times, dtype=np.float64), [value] * len(times))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def y0(self) -> ExtReal:
        return self.values[0]

    def as_array(self) -> np.ndarray:
        """Values as floats, Infinity as ``inf``."""
        return np.array([v.value for v in self.values], dtype=np.float64)

    def angles(self) -> np.ndarray:
        return np.array([v.angle() for v in self.values], dtype=np.float64)

    def with_pole_samples(self, atol: float = 1e-12) -> SolutionTrace:
        """The trace with an Infinity sample at each pole time between samples.

        Poles already sampled (within ``atol``) are not duplicated.
        """
        lo, hi = float(self.times[0]), float(self.times[-1])
        extra = [
            t
            for t in self.pole_times
            if lo < t < hi and not np.any(np.abs(self.times - t) <= atol * (1.0 + abs(t)))
        ]
        if not extra:
            return self
        times = np.concatenate([self.times, np.asarray(extra, dtype=np.float64)])
        order = np.argsort(times, kind="stable")
        values = self.values + [INFINITY] * len(extra)
        charts = self.charts + [Chart.INVERTED] * len(extra)
        return SolutionTrace(
            times[order],
            [values[i] for i in order],
            [charts[i] for i in order],
            residual=self.residual,
            pole_times=list(self.pole_times),
            switches=list(self.switches),
            meta=dict(self.meta),
        )

    def map(self, fn: Callable[[float, ExtReal], ExtReal]) -> SolutionTrace:
        """Apply ``fn(t, y)`` pointwise; chart tags and poles are not carried over."""
        out = [fn(float(t), y) for t, y in zip(self.times, self.values, strict=True)]
        return SolutionTrace(self.times.copy(), out, meta=dict(self.meta))

    def _check_same_times(self, other: SolutionTrace) -> None:
        if len(self) != len(other) or not np.allclose(
            self.times, other.times, rtol=1e-12, atol=1e-12
        ):
            raise GridMismatchError("Traces are sampled on different times")

    def sup_chordal(self, other: SolutionTrace) -> float:
        """Largest chordal distance between samples at the same times."""
        self._check_same_times(other)
        return max(
            (chordal_distance(a, b) for a, b in zip(self.values, other.values, strict=True)),
            default=0.0,
        )

    def sup_abs(self, other: SolutionTrace, cap: float = ABS_COMPARE_CAP) -> float:
        """Largest |y − z| over samples where both stay within ``cap``."""
        self._check_same_times(other)
        a, b = self.as_array(), other.as_array()
        mask = (np.abs(a) <= cap) & (np.abs(b) <= cap)
        if not np.any(mask):
            return 0.0
        return float(np.max(np.abs(a[mask] - b[mask])))
