"""Cubic Hermite interpolation that also runs on dual numbers."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from riccatikit.errors import DomainError, InputError
from riccatikit.expr.dual import Number, primal
from riccatikit.expr.nodes import Closure

# Knots may be evaluated this far outside the table (relative to its span).
_EDGE_SLACK = 1e-12


class HermiteTable:
    """Piecewise cubic Hermite interpolant of one or more columns.

    Args:
        times: Strictly increasing knot times.
        values: Array of shape (n,) or (n, k).
        slopes: Derivatives at the knots, same shape as ``values``.
    """

    def __init__(self, times: Sequence[float], values: np.ndarray, slopes: np.ndarray) -> None:
        t = np.asarray(times, dtype=np.float64)
        v = np.asarray(values, dtype=np.float64)
        m = np.asarray(slopes, dtype=np.float64)
        if v.ndim == 1:
            v, m = v[:, None], m[:, None]
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0.0):
            raise InputError("Hermite knots must be at least two strictly increasing times")
        if v.shape[0] != t.size or v.shape != m.shape:
            raise InputError("Hermite values and slopes must match the knots")
        self.times, self.values, self.slopes = t, v, m

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def span(self) -> tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])

    def _locate(self, t: float) -> int:
        lo, hi = self.span
        slack = _EDGE_SLACK * max(1.0, hi - lo)
        if t < lo - slack or t > hi + slack:
            raise DomainError(f"outside tabulated span [{lo}, {hi}]", t=t)
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        return min(max(i, 0), self.times.size - 2)

    def evaluate(self, x: Number, column: int = 0) -> Number:
        i = self._locate(primal(x))
        t0, t1 = self.times[i], self.times[i + 1]
        h = float(t1 - t0)
        s = (x - float(t0)) * (1.0 / h)
        s2 = s * s
        s3 = s2 * s
        h00 = 2.0 * s3 - 3.0 * s2 + 1.0
        h10 = s3 - 2.0 * s2 + s
        h01 = -2.0 * s3 + 3.0 * s2
        h11 = s3 - s2
        v0, v1 = float(self.values[i, column]), float(self.values[i + 1, column])
        m0, m1 = h * float(self.slopes[i, column]), h * float(self.slopes[i + 1, column])
        return h00 * v0 + h10 * m0 + h01 * v1 + h11 * m1

    def row(self, x: Number) -> list[Number]:
        return [self.evaluate(x, j) for j in range(self.width)]

    def closure(self, column: int = 0, label: str = "hermite") -> Closure:
        return Closure(lambda x: self.evaluate(x, column), label=label)
