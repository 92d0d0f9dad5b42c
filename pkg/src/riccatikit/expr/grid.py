"""Sample grids for constancy and residual checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from riccatikit.errors import InputError
from riccatikit.expr.nodes import Expr

MIN_POINTS = 8


@dataclass(frozen=True)
class Grid:
    """Strictly increasing sample times inside a domain, with a relative tolerance."""

    points: np.ndarray = field(repr=False)
    tolerance: float = 1e-8

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < MIN_POINTS:
            raise InputError(f"A grid needs at least {MIN_POINTS} points, got {pts.size}")
        if not np.all(np.isfinite(pts)) or np.any(np.diff(pts) <= 0.0):
            raise InputError("Grid points must be finite and strictly increasing")
        if self.tolerance <= 0.0:
            raise InputError("Grid tolerance must be positive")
        object.__setattr__(self, "points", pts)

    @classmethod
    def chebyshev(cls, lo: float, hi: float, n: int = 256, tolerance: float = 1e-8) -> Grid:
        """Interior Chebyshev points of the first kind; endpoints are never sampled."""
        _check_interval(lo, hi)
        k = np.arange(1, n + 1)
        nodes = np.cos((2 * k - 1) * math.pi / (2 * n))
        pts = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes
        return cls(np.sort(pts), tolerance)

    @classmethod
    def uniform(cls, lo: float, hi: float, n: int = 256, tolerance: float = 1e-8) -> Grid:
        """Uniform interior points (cell midpoints)."""
        _check_interval(lo, hi)
        h = (hi - lo) / n
        return cls(lo + h * (np.arange(n) + 0.5), tolerance)

    @classmethod
    def build(cls, lo: float, hi: float, n: int, tolerance: float, kind: str) -> Grid:
        if kind == "chebyshev":
            return cls.chebyshev(lo, hi, n, tolerance)
        if kind == "uniform":
            return cls.uniform(lo, hi, n, tolerance)
        raise InputError(f"Unknown grid kind: {kind}")

    @property
    def lo(self) -> float:
        return float(self.points[0])

    @property
    def hi(self) -> float:
        return float(self.points[-1])

    def __len__(self) -> int:
        return int(self.points.size)

    def sample(self, e: Expr) -> np.ndarray:
        return np.array([e.eval(t) for t in self.points], dtype=np.float64)

    def inside(self, lo: float, hi: float) -> bool:
        return lo <= self.lo and self.hi <= hi


def _check_interval(lo: float, hi: float) -> None:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise InputError(f"Empty or unbounded domain [{lo}, {hi}]")


@dataclass(frozen=True)
class Constancy:
    mean: float
    deviation: float
    ok: bool


def constancy(values: np.ndarray, tolerance: float) -> Constancy:
    """Check that sampled values are one constant up to a relative tolerance."""
    mean = float(np.mean(values))
    deviation = float(np.max(np.abs(values - mean))) / max(1.0, abs(mean))
    return Constancy(mean, deviation, deviation <= tolerance)


def is_constant_on(e: Expr, grid: Grid) -> Constancy:
    return constancy(grid.sample(e), grid.tolerance)
