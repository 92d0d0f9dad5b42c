"""Time-parametrized curves in SL(2,R)."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence

import numpy as np

from riccatikit.algebra.hermite import HermiteTable
from riccatikit.algebra.sl2 import SL2
from riccatikit.errors import DeterminantError, InputError
from riccatikit.expr import dual
from riccatikit.expr.dual import Number
from riccatikit.expr.grid import Grid
from riccatikit.expr.nodes import Closure, Expr, Num

ANALYTIC_DET_TOL = 1e-8
_CHECK_POINTS = 64

Domain = tuple[float, float]
WHOLE_LINE: Domain = (-math.inf, math.inf)


def intersect(a: Domain, b: Domain) -> Domain:
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    if hi <= lo:
        raise InputError(f"Domains {a} and {b} do not overlap")
    return (lo, hi)


class SL2Curve(ABC):
    """A curve t ↦ Ā(t) in SL(2,R)."""

    @property
    @abstractmethod
    def domain(self) -> Domain:
        """Open interval on which the curve is defined."""

    @abstractmethod
    def at(self, t: float) -> SL2:
        """The matrix Ā(t)."""

    @abstractmethod
    def entries(self) -> tuple[Expr, Expr, Expr, Expr]:
        """(α, β, γ, δ) as differentiable expressions in t."""

    def inverse(self) -> SL2Curve:
        a, b, c, d = self.entries()
        return AnalyticCurve(d, -b, -c, a, self.domain, check=False)

    def compose(self, other: SL2Curve) -> SL2Curve:
        """Pointwise product Ā(t)·B̄(t); acts as "first other, then self"."""
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return AnalyticCurve(
            a * e + b * g,
            a * f + b * h,
            c * e + d * g,
            c * f + d * h,
            intersect(self.domain, other.domain),
            check=False,
        )


class ConstantCurve(SL2Curve):
    def __init__(self, matrix: SL2, domain: Domain = WHOLE_LINE) -> None:
        self.matrix = matrix
        self._domain = domain

    @property
    def domain(self) -> Domain:
        return self._domain

    def at(self, t: float) -> SL2:
        return self.matrix

    def entries(self) -> tuple[Expr, Expr, Expr, Expr]:
        a, b, c, d = self.matrix.entries()
        return (Num(a), Num(b), Num(c), Num(d))

    def inverse(self) -> SL2Curve:
        return ConstantCurve(self.matrix.inverse(), self._domain)

    def __repr__(self) -> str:
        return f"ConstantCurve({self.matrix})"


class AnalyticCurve(SL2Curve):
    """Curve given by four expressions; det is checked on a grid of the domain."""

    def __init__(
        self,
        alpha: Expr,
        beta: Expr,
        gamma: Expr,
        delta: Expr,
        domain: Domain,
        check: bool = True,
    ) -> None:
        self._entries = (alpha, beta, gamma, delta)
        self._domain = domain
        if check:
            self.validate()

    @property
    def domain(self) -> Domain:
        return self._domain

    def entries(self) -> tuple[Expr, Expr, Expr, Expr]:
        return self._entries

    def raw(self, t: float) -> tuple[float, float, float, float]:
        a, b, c, d = (e.eval(t) for e in self._entries)
        return a, b, c, d

    def at(self, t: float) -> SL2:
        a, b, c, d = self.raw(t)
        return SL2.normalized([[a, b], [c, d]])

    def validate(self) -> float:
        """Max |det − 1| on a Chebyshev grid of the (finite) domain."""
        lo, hi = self._domain
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InputError("Analytic curves need a finite domain")
        drift = 0.0
        for t in Grid.chebyshev(lo, hi, _CHECK_POINTS).points:
            a, b, c, d = self.raw(float(t))
            drift = max(drift, abs(a * d - b * c - 1.0))
        if drift > ANALYTIC_DET_TOL:
            raise DeterminantError(f"Curve determinant deviates from 1 by {drift:.3e}")
        return drift


class TabulatedCurve(SL2Curve):
    """Knot matrices joined by cubic Hermite interpolation plus det renormalization.

    Args:
        times: Strictly increasing knot times.
        mats: One SL2 per knot.
        slopes: Optional 2×2 derivatives at the knots; finite differences otherwise.
    """

    def __init__(
        self,
        times: Sequence[float],
        mats: Sequence[SL2],
        slopes: Sequence[np.ndarray] | None = None,
    ) -> None:
        if len(times) != len(mats):
            raise InputError("Tabulated curve needs one matrix per knot")
        self.times = np.asarray(times, dtype=np.float64)
        self.mats = list(mats)
        values = np.array([m.entries() for m in self.mats], dtype=np.float64)
        if slopes is None:
            deriv = np.gradient(values, self.times, axis=0)
        else:
            deriv = np.array([np.asarray(s, dtype=np.float64).reshape(4) for s in slopes])
        self.table = HermiteTable(self.times, values, deriv)
        self._entries = tuple(
            Closure(self._normalized_entry(j), label=f"tabulated[{j}]") for j in range(4)
        )

    def _normalized_entry(self, j: int) -> Callable[[Number], Number]:
        def fn(x: Number) -> Number:
            a, b, c, d = self.table.row(x)
            return (a, b, c, d)[j] / dual.sqrt(a * d - b * c)

        return fn

    @property
    def domain(self) -> Domain:
        return self.table.span

    def at(self, t: float) -> SL2:
        return SL2.normalized(np.reshape(self.table.row(float(t)), (2, 2)))

    def entries(self) -> tuple[Expr, Expr, Expr, Expr]:
        return self._entries  # type: ignore[return-value]
