"""SL(2,R) matrices, the sl(2,R) basis M0, M1, M2 and the Möbius action."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from riccatikit.algebra.extreal import INFINITY, ExtReal
from riccatikit.errors import DeterminantError

DET_TOL = 1e-9
POLE_REL_TOL = 1e-12

Scalar = float | Fraction


def det_check(a: SL2 | Any) -> float:
    """Return αδ − βγ of an SL2 or of any 2×2 array-like."""
    if isinstance(a, SL2):
        return a.alpha * a.delta - a.beta * a.gamma
    m = np.asarray(a, dtype=np.float64)
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


@dataclass(frozen=True, slots=True)
class SL2:
    """Real 2×2 matrix ((α, β), (γ, δ)) with unit determinant."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self) -> None:
        det = self.alpha * self.delta - self.beta * self.gamma
        if not math.isfinite(det) or abs(det - 1.0) > DET_TOL:
            raise DeterminantError(f"Determinant {det!r} is not 1 within {DET_TOL}")

    @classmethod
    def identity(cls) -> SL2:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m: Any) -> SL2:
        a = np.asarray(m, dtype=np.float64)
        return cls(float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]))

    @classmethod
    def normalized(cls, m: Any) -> SL2:
        """Divide a positive-determinant matrix by sqrt(det)."""
        det = det_check(m)
        if not det > 0.0:
            raise DeterminantError(f"Cannot normalize a matrix with determinant {det!r}")
        a = np.asarray(m, dtype=np.float64) / math.sqrt(det)
        return cls.from_matrix(a)

    @property
    def trace(self) -> float:
        return self.alpha + self.delta

    def as_array(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [self.gamma, self.delta]])

    def entries(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def inverse(self) -> SL2:
        return SL2(self.delta, -self.beta, -self.gamma, self.alpha)

    def canonical(self) -> SL2:
        """±A with non-negative trace (A and −A act identically)."""
        if self.trace < 0.0:
            return SL2(-self.alpha, -self.beta, -self.gamma, -self.delta)
        return self

    def __matmul__(self, other: SL2) -> SL2:
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return SL2.normalized([[a * e + b * g, a * f + b * h], [c * e + d * g, c * f + d * h]])


def mobius(a: SL2, y: ExtReal) -> ExtReal:
    """Apply y ↦ (αy + β)/(γy + δ) on the compactified line."""
    return mobius_entries(a.alpha, a.beta, a.gamma, a.delta, y)


def mobius_entries(alpha: float, beta: float, gamma: float, delta: float, y: ExtReal) -> ExtReal:
    """Möbius action of any invertible matrix given up to a positive scale."""
    if y.is_infinite:
        if gamma == 0.0:
            return INFINITY
        return ExtReal(alpha / gamma)
    v = y.value
    den = gamma * v + delta
    if abs(den) < POLE_REL_TOL * (abs(gamma * v) + abs(delta) + 1.0):
        return INFINITY
    out = (alpha * v + beta) / den
    return ExtReal(out) if math.isfinite(out) else INFINITY


# ---------------------------------------------------------------------------
# Lie algebra sl(2,R)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sl2Elem:
    """Coordinates (c0, c1, c2) of c0·M0 + c1·M1 + c2·M2.

    M0 = ((0, −1), (0, 0)), M1 = ½((−1, 0), (0, 1)), M2 = ((0, 0), (1, 0)).
    Coordinates may be ``Fraction`` for exact arithmetic.
    """

    c0: Scalar = 0
    c1: Scalar = 0
    c2: Scalar = 0

    @classmethod
    def from_coefficients(cls, b0: Scalar, b1: Scalar, b2: Scalar) -> Sl2Elem:
        """a(t) = −Σ bⱼ Mⱼ for the Riccati coefficients (b0, b1, b2)."""
        return cls(-b0, -b1, -b2)

    @classmethod
    def from_matrix(cls, m: Any) -> Sl2Elem:
        """Inverse of :meth:`matrix` for traceless 2×2 matrices."""
        return cls(-m[0][1], -2 * m[0][0], m[1][0])

    def matrix(self) -> list[list[Scalar]]:
        half = Fraction(1, 2) if isinstance(self.c1, (Fraction, int)) else 0.5
        return [[-half * self.c1, -self.c0], [self.c2, half * self.c1]]

    def __add__(self, other: Sl2Elem) -> Sl2Elem:
        return Sl2Elem(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other: Sl2Elem) -> Sl2Elem:
        return Sl2Elem(self.c0 - other.c0, self.c1 - other.c1, self.c2 - other.c2)

    def scale(self, k: Scalar) -> Sl2Elem:
        return Sl2Elem(k * self.c0, k * self.c1, k * self.c2)


M0 = Sl2Elem(1, 0, 0)
M1 = Sl2Elem(0, 1, 0)
M2 = Sl2Elem(0, 0, 1)
BASIS = (M0, M1, M2)


def commutator(x: Sl2Elem, y: Sl2Elem) -> Sl2Elem:
    """[X, Y] = XY − YX in the M-basis.

    Structure constants: [M0, M1] = M0, [M0, M2] = 2·M1, [M1, M2] = M2.
    """
    return Sl2Elem(
        x.c0 * y.c1 - x.c1 * y.c0,
        2 * (x.c0 * y.c2 - x.c2 * y.c0),
        x.c1 * y.c2 - x.c2 * y.c1,
    )


def matrix_commutator(a: list[list[Scalar]], b: list[list[Scalar]]) -> list[list[Scalar]]:
    """AB − BA for 2×2 nested lists (exact with Fractions)."""

    def mul(p: list[list[Scalar]], q: list[list[Scalar]]) -> list[list[Scalar]]:
        return [[sum(p[i][k] * q[k][j] for k in range(2)) for j in range(2)] for i in range(2)]

    ab, ba = mul(a, b), mul(b, a)
    return [[ab[i][j] - ba[i][j] for j in range(2)] for i in range(2)]
