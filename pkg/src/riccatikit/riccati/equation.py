"""Riccati equations dy/dt = b0(t) + b1(t)·y + b2(t)·y² and integrable target forms."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from riccatikit.algebra.curves import Domain
from riccatikit.errors import DomainError, InputError
from riccatikit.expr import parse
from riccatikit.expr.grid import Grid, constancy
from riccatikit.expr.nodes import Expr, Num

logger = logging.getLogger(__name__)

# Grid used for the cached vanishing flags and the construction check.
FLAG_POINTS = 256
# |b| below this on every sample counts as identically zero.
ZERO_TOL = 1e-12


def vanishes(values: np.ndarray, tol: float = ZERO_TOL) -> bool:
    return bool(np.max(np.abs(values)) <= tol)


def nonvanishing(values: np.ndarray, tol: float = ZERO_TOL) -> bool:
    """No sample is (numerically) zero and no sign change occurs."""
    return bool(np.all(values > tol) or np.all(values < -tol))


@dataclass(frozen=True)
class RiccatiEq:
    """dy/dt = b0 + b1·y + b2·y² on the open interval ``domain``.

    Args:
        b0, b1, b2: Coefficient expressions in t.
        domain: Open interval (t_lo, t_hi).
        check: Evaluate the coefficients on a 256-point grid at construction.
    """

    b0: Expr
    b1: Expr
    b2: Expr
    domain: Domain
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self) -> None:
        lo, hi = self.domain
        if not hi > lo:
            raise InputError(f"Empty domain ({lo}, {hi})")
        if self.check:
            # Raises DomainError at the first failing sample.
            _ = self.flag_samples

    @classmethod
    def parse(
        cls,
        b0: str,
        b1: str,
        b2: str,
        params: dict[str, float] | None = None,
        domain: Domain = (0.0, 1.0),
    ) -> RiccatiEq:
        """Build an equation from three coefficient strings."""
        p = params or {}
        return cls(parse(b0, p), parse(b1, p), parse(b2, p), (float(domain[0]), float(domain[1])))

    @classmethod
    def from_constants(cls, b0: float, b1: float, b2: float, domain: Domain) -> RiccatiEq:
        return cls(Num(float(b0)), Num(float(b1)), Num(float(b2)), domain)

    @property
    def coefficients(self) -> tuple[Expr, Expr, Expr]:
        return (self.b0, self.b1, self.b2)

    def grid(self, n: int = FLAG_POINTS, tolerance: float = 1e-8, kind: str = "chebyshev") -> Grid:
        lo, hi = self.domain
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InputError("Sampling needs a finite domain")
        return Grid.build(lo, hi, n, tolerance, kind)

    def sample(self, grid: Grid) -> np.ndarray:
        """Coefficients on ``grid`` as a 3×n array."""
        return np.vstack([grid.sample(b) for b in self.coefficients])

    @cached_property
    def flag_samples(self) -> np.ndarray:
        return self.sample(self.grid(FLAG_POINTS))

    @cached_property
    def b0_nonvanishing(self) -> bool:
        return nonvanishing(self.flag_samples[0])

    @cached_property
    def b2_nonvanishing(self) -> bool:
        return nonvanishing(self.flag_samples[2])

    def is_linear(self, tol: float = ZERO_TOL) -> bool:
        """b2 ≡ 0 on the flag grid."""
        return vanishes(self.flag_samples[2], tol)

    def is_autonomous(self, tol: float = 1e-8) -> bool:
        """All three coefficients constant on the flag grid."""
        return all(constancy(row, tol).ok for row in self.flag_samples)

    def rhs(self, t: float, y: float) -> float:
        return self.b0.eval(t) + (self.b1.eval(t) + self.b2.eval(t) * y) * y

    def coefficients_at(self, t: float) -> tuple[float, float, float]:
        return (self.b0.eval(t), self.b1.eval(t), self.b2.eval(t))

    def inverted(self) -> RiccatiEq:
        """The equation satisfied by w = −1/y: coefficients (b2, −b1, b0)."""
        return RiccatiEq(self.b2, _negate(self.b1), self.b0, self.domain, check=False)

    def with_domain(self, domain: Domain) -> RiccatiEq:
        return RiccatiEq(self.b0, self.b1, self.b2, domain, check=self.check)

    def render(self) -> tuple[str, str, str]:
        return (self.b0.render(), self.b1.render(), self.b2.render())

    def __str__(self) -> str:
        try:
            b0, b1, b2 = self.render()
        except InputError:
            return f"RiccatiEq(<numeric>, domain={self.domain})"
        return f"dy/dt = ({b0}) + ({b1})*y + ({b2})*y^2 on {self.domain}"


def _negate(e: Expr) -> Expr:
    if isinstance(e, Num):
        return Num(-e.value)
    return -e


@dataclass(frozen=True)
class TargetForm:
    """dy'/dt = D(t)·(c0 + c1·y' + c2·y'²) with D never zero."""

    D: Expr
    c0: float
    c1: float
    c2: float

    @property
    def c(self) -> tuple[float, float, float]:
        return (self.c0, self.c1, self.c2)

    def check_on(self, grid: Grid) -> None:
        values = grid.sample(self.D)
        if not nonvanishing(values):
            i = int(np.argmin(np.abs(values)))
            raise DomainError("D vanishes or changes sign", t=float(grid.points[i]))

    def as_equation(self, domain: Domain, check: bool = True) -> RiccatiEq:
        if check:
            self.check_on(Grid.chebyshev(domain[0], domain[1], FLAG_POINTS))
        return RiccatiEq(
            _scaled(self.D, self.c0),
            _scaled(self.D, self.c1),
            _scaled(self.D, self.c2),
            domain,
            check=check,
        )


def _scaled(d: Expr, c: float) -> Expr:
    if c == 0.0:
        return Num(0.0)
    if c == 1.0:
        return d
    if isinstance(d, Num):
        return Num(c * d.value)
    return c * d
