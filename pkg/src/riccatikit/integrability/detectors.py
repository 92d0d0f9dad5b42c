"""Grid-based integrability detectors.

Every test here evaluates a candidate identity on a sample grid and accepts it
when the relative deviation stays within the grid tolerance. Constants that
the identities promise to exist are fitted as grid means.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from riccatikit.algebra.curves import AnalyticCurve, ConstantCurve, Domain
from riccatikit.algebra.sl2 import SL2
from riccatikit.errors import DomainError, InputError, NumericalError, SignIncompatibilityError
from riccatikit.expr import absolute, sqrt
from riccatikit.expr.grid import Grid, constancy
from riccatikit.expr.nodes import Closure, Diff, Expr, Num
from riccatikit.riccati.equation import ZERO_TOL, RiccatiEq, TargetForm, nonvanishing
from riccatikit.riccati.transform import transform
from riccatikit.solvers.linear import LinearEq, Primitive

logger = logging.getLogger(__name__)


def _sign(x: float) -> float:
    return 1.0 if x > 0.0 else -1.0


def _require_nonvanishing(values: np.ndarray, grid: Grid, name: str) -> None:
    bad = np.abs(values) <= ZERO_TOL
    if np.any(bad):
        raise DomainError(f"{name} vanishes on the grid", t=float(grid.points[np.argmax(bad)]))
    if not nonvanishing(values):
        i = int(np.argmin(np.abs(values)))
        raise DomainError(f"{name} changes sign on the grid", t=float(grid.points[i]))


def _log_ratio(e: Expr) -> Expr:
    """ė/e, zero for constants."""
    if isinstance(e, Num):
        return Num(0.0)
    return Diff(e) / e


# ---------------------------------------------------------------------------
# Constant-invariant test
# ---------------------------------------------------------------------------

def ctu_expression(eq: RiccatiEq) -> Expr:
    """(b1 + ½(ḃ2/b2 − ḃ0/b0)) / √|b0·b2|."""
    b0, b1, b2 = eq.coefficients
    shift = 0.5 * (_log_ratio(b2) - _log_ratio(b0))
    return (b1 + shift) / sqrt(absolute(b0 * b2))


def ctu_profile(eq: RiccatiEq, grid: Grid) -> np.ndarray:
    """The constant-invariant expression sampled on ``grid``.

    Raises:
        DomainError: b0 or b2 vanishes (or changes sign) on the grid.
    """
    rows = eq.sample(grid)
    _require_nonvanishing(rows[0], grid, "b0")
    _require_nonvanishing(rows[2], grid, "b2")
    return grid.sample(ctu_expression(eq))


def ctu_test(eq: RiccatiEq, grid: Grid) -> float | None:
    """Return K when the constant-invariant expression is constant on ``grid``.

    Raises:
        DomainError: b0 or b2 vanishes on the grid; the linear reductions apply
            instead.
    """
    c = constancy(ctu_profile(eq, grid), grid.tolerance)
    logger.debug("ctu_test: mean %.17g, deviation %.3e", c.mean, c.deviation)
    return c.mean if c.ok else None


# ---------------------------------------------------------------------------
# Transformation to D(t)·(c0 + c1·y + c2·y²)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TUResult:
    """Scaling y' = G·y taking an equation to a target form."""

    target: TargetForm
    G: Expr
    curve: AnalyticCurve
    residual: float


def tu_residual_profile(
    eq: RiccatiEq, c: tuple[float, float, float], D: Expr, grid: Grid
) -> np.ndarray:
    """Relative residual of b1 + ½(ḃ2/b2 − ḃ0/b0) = c1·D on ``grid``."""
    b0, b1, b2 = eq.coefficients
    lhs = grid.sample(b1 + 0.5 * (_log_ratio(b2) - _log_ratio(b0)))
    rhs = c[1] * grid.sample(D)
    return np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))


def tu_scale_function(eq: RiccatiEq, c: tuple[float, float, float], grid: Grid) -> Expr:
    """D = κ·√(b0·b2/(c0·c2)) with κ = sg(b0/c0), after the sign checks."""
    c0, _, c2 = c
    if c0 == 0.0 or c2 == 0.0:
        raise InputError("The target form needs c0·c2 ≠ 0")
    rows = eq.sample(grid)
    _require_nonvanishing(rows[0], grid, "b0")
    _require_nonvanishing(rows[2], grid, "b2")
    prod = rows[0] * rows[2]
    if not nonvanishing(prod) or _sign(float(prod[0])) != _sign(c0 * c2):
        raise SignIncompatibilityError(
            f"sign(b0·b2) does not match sign(c0·c2) = {_sign(c0 * c2):+g}"
        )
    kappa = _sign(float(rows[0][0]) / c0)
    b0, _, b2 = eq.coefficients
    D = sqrt(b0 * b2 * (1.0 / (c0 * c2)))
    return D if kappa > 0.0 else -D


def tu_transform(
    eq: RiccatiEq, c0: float, c1: float, c2: float, grid: Grid | None = None
) -> TUResult | None:
    """Find the positive scaling y' = G·y that maps ``eq`` to D·(c0 + c1·y' + c2·y'²).

    Args:
        eq: Source equation.
        c0, c1, c2: Target constants, c0·c2 ≠ 0.
        grid: Sample grid; the equation's default grid when omitted.

    Returns:
        Target form, G = √(b2·c0/(b0·c2)) and the curve diag(√G, 1/√G), or
        None when the remaining condition fails on the grid.

    Raises:
        SignIncompatibilityError: sign(b0·b2) and sign(c0·c2) differ.
    """
    grid = grid or eq.grid()
    c = (float(c0), float(c1), float(c2))
    D = tu_scale_function(eq, c, grid)
    profile = tu_residual_profile(eq, c, D, grid)
    residual = float(np.max(profile))
    if residual > grid.tolerance:
        worst = float(grid.points[int(np.argmax(profile))])
        logger.debug("tu_transform: condition fails, residual %.3e at t=%.6g", residual, worst)
        return None
    b0, _, b2 = eq.coefficients
    G = sqrt(b2 * c0 / (b0 * c2))
    root = sqrt(G)
    curve = AnalyticCurve(root, Num(0.0), Num(0.0), 1.0 / root, eq.domain, check=False)
    return TUResult(TargetForm(D, *c), G, curve, residual)


def c2tu_family(
    D: Expr, c0: float, c1: float, c2: float, b0: Expr, domain: Domain
) -> RiccatiEq:
    """The equation (b0, ḃ0/b0 − Ḋ/D + c1·D, D²·c0·c2/b0).

    Every member scales to D·(c0 + c1·y + c2·y²).
    """
    if c0 == 0.0 or c2 == 0.0:
        raise InputError("The target form needs c0·c2 ≠ 0")
    parts: list[Expr] = []
    if not isinstance(b0, Num):
        parts.append(Diff(b0) / b0)
    if not isinstance(D, Num):
        parts.append(-(Diff(D) / D))
    if c1 != 0.0:
        parts.append(_times(c1, D))
    b1: Expr = Num(0.0)
    for k, p in enumerate(parts):
        b1 = p if k == 0 else b1 + p
    if isinstance(D, Num):
        b2 = _times(c0 * c2 * D.value * D.value, 1.0 / b0)
    else:
        b2 = _times(c0 * c2, D * D / b0)
    return RiccatiEq(b0, b1, b2, domain)


def _times(k: float, e: Expr) -> Expr:
    if isinstance(e, Num):
        return Num(k * e.value)
    return e if k == 1.0 else k * e


# ---------------------------------------------------------------------------
# Constant particular solutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearizationResult:
    """A constant solution c and the constant curve that sends it to infinity."""

    c: float
    curve: SL2
    linear: LinearEq
    residual: float
    roots: tuple[float, ...]

    @property
    def K(self) -> float:
        """Reciprocal of the constant solution."""
        return math.inf if self.c == 0.0 else 1.0 / self.c


def quadratic_roots(b0: float, b1: float, b2: float) -> list[float]:
    """Real roots of b0 + b1·c + b2·c², sorted by |c| then value."""
    if abs(b2) <= ZERO_TOL * max(1.0, abs(b0), abs(b1)):
        return [] if b1 == 0.0 else [-b0 / b1]
    disc = b1 * b1 - 4.0 * b0 * b2
    if disc < 0.0:
        return []
    root = math.sqrt(disc)
    # Cancellation-free pair.
    q = -0.5 * (b1 + math.copysign(root, b1))
    roots = {q / b2, b0 / q} if q != 0.0 else {0.0}
    return sorted(roots, key=lambda r: (abs(r), r))


def intcond_values(b0: float, b1: float, b2: float) -> list[float]:
    """(−b1 ± √(b1² − 4·b0·b2))/(2·b0): the reciprocals of the constant roots."""
    if b0 == 0.0:
        raise InputError("b0 must be non-zero")
    disc = b1 * b1 - 4.0 * b0 * b2
    if disc < 0.0:
        return []
    root = math.sqrt(disc)
    return sorted({(-b1 - root) / (2.0 * b0), (-b1 + root) / (2.0 * b0)})


def root_residual(rows: np.ndarray, c: float) -> float:
    """max |b0 + b1·c + b2·c²| relative to the size of its terms."""
    terms = np.abs(rows[0]) + np.abs(rows[1] * c) + np.abs(rows[2] * c * c)
    value = np.abs(rows[0] + rows[1] * c + rows[2] * c * c)
    return float(np.max(value) / max(1.0, float(np.max(terms))))


def pole_curve(c: float) -> SL2:
    """Constant unit-determinant matrix sending c to infinity."""
    if c == 0.0:
        return SL2(0.0, -1.0, 1.0, 0.0)
    return SL2(0.0, c, -1.0 / c, 1.0)


def linearization_test(eq: RiccatiEq, grid: Grid | None = None) -> LinearizationResult | None:
    """Search for a real constant c with b0 + b1·c + b2·c² ≡ 0 on the grid.

    Candidate roots come from the pointwise quadratic at the sample where |b2|
    is largest; the smallest |c| that passes the residual check wins.

    Returns:
        The constant, the curve y' = c/(1 − y/c) and the linear equation it
        produces, or None.
    """
    grid = grid or eq.grid()
    rows = eq.sample(grid)
    j = int(np.argmax(np.abs(rows[2])))
    candidates = quadratic_roots(float(rows[0][j]), float(rows[1][j]), float(rows[2][j]))
    accepted = [c for c in candidates if root_residual(rows, c) <= grid.tolerance]
    if not accepted:
        return None
    c = accepted[0]
    curve = pole_curve(c)
    out = transform(eq, ConstantCurve(curve, eq.domain))
    linear = LinearEq(out.b0, out.b1, eq.domain)
    residual = root_residual(rows, c)
    logger.debug("linearization_test: c=%.17g, residual %.3e", c, residual)
    return LinearizationResult(c, curve, linear, residual, tuple(accepted))


# ---------------------------------------------------------------------------
# The M = b1/b2 reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpecialMResult:
    """D and M = b1/b2 for equations with d/dt(b1/b2) = −b0."""

    D: Expr
    M: Expr
    A: Expr
    residual: float
    t_ref: float


def special_M_residual(eq: RiccatiEq, grid: Grid) -> float:
    """max |d/dt(b1/b2) + b0| relative to max(1, |b0|)."""
    b0, b1, b2 = eq.coefficients
    lhs = grid.sample(Diff(b1 / b2))
    rhs = grid.sample(b0)
    return float(np.max(np.abs(lhs + rhs) / np.maximum(1.0, np.abs(rhs))))


def _knots(grid: Grid, t_ref: float, domain: Domain | None) -> np.ndarray:
    pts = set(map(float, grid.points)) | {t_ref}
    for end in domain or ():
        if math.isfinite(end):
            pts.add(float(end))
    return np.array(sorted(pts))


def special_D(A: Expr, c1: float, knots: np.ndarray, t_ref: float, tol: float = 1e-12) -> Expr:
    """D(t) = exp(∫A)/(1 + c1·∫exp(∫A)), both integrals from ``t_ref``; D(t_ref) = 1.

    The node carries its derivative A·D − c1·D², so it differentiates like a
    coefficient.
    """
    E = Primitive(A, knots, tol)
    E_ref = E(t_ref)

    def growth(s: float) -> float:
        return math.exp(E(float(s)) - E_ref)

    S = Primitive(growth, knots, tol) if c1 != 0.0 else None
    S_ref = S(t_ref) if S is not None else 0.0

    def fn(x: float) -> float:
        t = float(x)
        den = 1.0 + (c1 * (S(t) - S_ref) if S is not None else 0.0)
        if den <= 0.0:
            raise DomainError("D is unbounded", t=t)
        return growth(t) / den

    value_only = Closure(fn, label="D (M=b1/b2)")
    derivative = A * value_only if c1 == 0.0 else A * value_only - c1 * value_only * value_only
    return Closure(fn, derivative=derivative, label="D (M=b1/b2)")


def ft2_special_M(eq: RiccatiEq, c1: float, grid: Grid | None = None) -> SpecialMResult | None:
    """Check d/dt(b1/b2) = −b0 and build D for the shift M = b1/b2.

    With A = −b1 + ḃ2/b2, D(t) = exp(∫A)/(C + c1·∫exp(∫A)) with C fixed by
    D = 1 at the reference time (0 when inside the domain, else its left end).

    Returns:
        D, M and A, or None when the condition fails.
    """
    grid = grid or eq.grid()
    b0, b1, b2 = eq.coefficients
    _require_nonvanishing(grid.sample(b2), grid, "b2")
    residual = special_M_residual(eq, grid)
    if residual > grid.tolerance:
        logger.debug("ft2_special_M: condition residual %.3e", residual)
        return None
    lo, hi = eq.domain
    t_ref = 0.0 if lo < 0.0 < hi else (lo if math.isfinite(lo) else grid.lo)
    A = -b1 + _log_ratio(b2)
    try:
        D = special_D(A, c1, _knots(grid, t_ref, eq.domain), t_ref)
    except NumericalError:
        # Endpoint singularity: tabulate on the grid span only.
        t_ref = min(max(t_ref, grid.lo), grid.hi)
        D = special_D(A, c1, _knots(grid, t_ref, None), t_ref)
    return SpecialMResult(D, b1 / b2, A, residual, t_ref)
