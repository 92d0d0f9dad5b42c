"""Named equations from the literature with known classifications.

Each constructor returns a ``FixtureCase``; the registered classes wrap the
constructors with their default parameters.
"""

from __future__ import annotations

import math

import numpy as np

from riccatikit.algebra.curves import Domain
from riccatikit.errors import InputError
from riccatikit.expr import exp, parse, sqrt
from riccatikit.expr.nodes import Diff, Expr, Num, Var
from riccatikit.integrability.detectors import c2tu_family
from riccatikit.integrability.fixtures.base import Fixture, FixtureCase, FixtureInfo
from riccatikit.integrability.fixtures.registry import register_fixture
from riccatikit.riccati.equation import RiccatiEq
from riccatikit.solvers.linear import LinearEq, linear_closure
from riccatikit.solvers.special import hovy_coefficients, hovy_D, hovy_K
from riccatikit.types import CaseKind

_CLOSURE_KNOTS = 401


def _expr(e: str | Expr | float) -> Expr:
    if isinstance(e, Expr):
        return e
    if isinstance(e, str):
        return parse(e)
    return Num(float(e))


def _log_derivative(e: Expr) -> Expr:
    return Num(0.0) if isinstance(e, Num) else Diff(e) / e


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def allen_stein(
    b0: str | Expr = "exp(t)",
    b2: str | Expr = "1 + t^2",
    C: float = 0.5,
    domain: Domain = (0.0, 2.0),
) -> FixtureCase:
    """b1 chosen so that (b1 + (ḃ2/b2 − ḃ0/b0)/2)/√(b0·b2) equals C.

    Requires b0·b2 > 0 on the domain.
    """
    e0, e2 = _expr(b0), _expr(b2)
    half = 0.5 * (_log_derivative(e2) - _log_derivative(e0))
    b1 = C * sqrt(e0 * e2) - half
    eq = RiccatiEq(e0, b1, e2, domain)
    return FixtureCase(
        name="allen_stein",
        equation=eq,
        expected_case=CaseKind.CTU_INTEGRABLE,
        expected_constant=C,
        y0=0.0,
        y0_list=[-1.0, 0.0, 0.5],
        extras={"C": C, "target_c": [1.0, C, 1.0]},
    )


def rao_ukidave(
    c: float = 4.0,
    k: float = 1.0,
    b0: str | Expr = "1",
    b1: str | Expr = "1",
    v0: float = 1.0,
    domain: Domain = (0.0, 2.0),
) -> FixtureCase:
    """b2 = b0/(c·v²) with dv/dt = b1·v + k·b0, v(t_lo) = v0.

    Constant b0, b1 give v in closed form; otherwise v is the quadrature
    solution of its linear equation and the fixture has no textual form.
    """
    if not c > 0.0:
        raise InputError(f"c must be positive, got {c}")
    e0, e1 = _expr(b0), _expr(b1)
    lo, hi = domain
    v: Expr
    if isinstance(e0, Num) and isinstance(e1, Num) and e1.value != 0.0:
        rest = k * e0.value / e1.value
        v = (v0 + rest) * exp(e1.value * (Var() - lo)) - rest
    else:
        knots = np.linspace(lo, hi, _CLOSURE_KNOTS)
        v = linear_closure(LinearEq(_times(k, e0), e1, domain), lo, v0, knots, label="v")
    b2 = e0 / (c * (v * v))
    eq = RiccatiEq(e0, e1, b2, domain)
    return FixtureCase(
        name="rao_ukidave",
        equation=eq,
        expected_case=CaseKind.CTU_INTEGRABLE,
        expected_constant=-k * math.sqrt(c) * _sign_at(e0, lo, hi),
        y0=0.0,
        y0_list=[-0.5, 0.0, 0.5],
        extras={"c": c, "k": k, "v": v, "target_c": [1.0, -k, 1.0 / c]},
    )


def _times(k: float, e: Expr) -> Expr:
    if isinstance(e, Num):
        return Num(k * e.value)
    return e if k == 1.0 else k * e


def _sign_at(e: Expr, lo: float, hi: float) -> float:
    return 1.0 if e.eval(0.5 * (lo + hi)) > 0.0 else -1.0


def kovalevskaya(
    F: str | Expr = "exp(t)",
    L: float = 2.0,
    K: float = 4.0,
    domain: Domain = (0.0, 2.0),
) -> FixtureCase:
    """dy/dt = F + (L + Ḟ/F)·y − (K/F)·y², built as the family over D ≡ 1."""
    eq = c2tu_family(Num(1.0), 1.0, L, -K, _expr(F), domain)
    return FixtureCase(
        name="kovalevskaya",
        equation=eq,
        expected_case=CaseKind.CTU_INTEGRABLE,
        expected_constant=L / math.sqrt(abs(K)),
        y0=0.0,
        y0_list=[-0.25, 0.0, 0.25],
        extras={"L": L, "K": K, "target_c": [1.0, L, -K]},
    )


def hong_xiang(
    G: str | Expr = "exp(t)",
    b: float = 1.0,
    c: float = 4.0,
    domain: Domain = (0.0, 1.0),
) -> FixtureCase:
    """dy/dt = −c·G² − (2b·G − Ġ/G)·y − y²."""
    g = _expr(G)
    b0 = -c * (g * g)
    b1 = -(2.0 * b * g - Diff(g) / g)
    eq = RiccatiEq(b0, b1, Num(-1.0), domain)
    return FixtureCase(
        name="hong_xiang",
        equation=eq,
        expected_case=CaseKind.CTU_INTEGRABLE,
        expected_constant=-2.0 * b / math.sqrt(c),
        y0=0.0,
        y0_list=[-0.5, 0.0, 0.5],
        extras={"b": b, "c": c},
    )


def hovy(n: float = 2.0, domain: Domain = (0.5, 5.0), y0: float = 2.0) -> FixtureCase:
    """dy/dt = −n/t + (1 + n/t)·y − y², which has the constant solution 1."""
    b0, b1, b2 = hovy_coefficients(n)
    eq = RiccatiEq(b0, b1, b2, domain)
    t0 = domain[0]
    D = hovy_D(n)
    return FixtureCase(
        name="hovy",
        equation=eq,
        expected_case=CaseKind.LINEARIZABLE_BY_CONSTANT,
        expected_constant=1.0,
        y0=y0,
        t_span=(t0, domain[1]),
        y0_list=[0.0, 0.5, y0],
        extras={
            "n": n,
            "K": hovy_K(n, t0, y0),
            "D": D,
            "ft2_c": [0.0, 0.0, 1.0],
            "M0": -1.0,
            "D0": D.eval(t0),
        },
    )


def ibragimov(
    P: str | Expr = "2 + cos(t)",
    Q: str | Expr = "1",
    k: float = 3.0,
    domain: Domain = (0.0, 6.0),
) -> FixtureCase:
    """dy/dt = P + Q·y + k·(Q − k·P)·y², with the constant solution −1/k."""
    if k == 0.0:
        raise InputError("k must be non-zero")
    p, q = _expr(P), _expr(Q)
    b2 = k * (q - k * p)
    eq = RiccatiEq(p, q, b2, domain)
    return FixtureCase(
        name="ibragimov",
        equation=eq,
        expected_case=CaseKind.LINEARIZABLE_BY_CONSTANT,
        expected_constant=-1.0 / k,
        y0=0.0,
        y0_list=[-1.0, 0.0, 1.0],
        extras={"k": k, "K": -k},
    )


def autonomous_two_roots(domain: Domain = (0.0, 2.0)) -> FixtureCase:
    """dy/dt = −2 + 3y − y², with equilibria 1 and 2."""
    return FixtureCase(
        name="autonomous_two_roots",
        equation=RiccatiEq.from_constants(-2.0, 3.0, -1.0, domain),
        expected_case=CaseKind.AUTONOMOUS,
        y0=1.5,
        y0_list=[0.0, 1.0, 1.5, 3.0],
        extras={"roots": [1.0, 2.0], "intcond": [0.5, 1.0]},
    )


def tangent(domain: Domain = (0.0, 2.0)) -> FixtureCase:
    """dy/dt = 1 + y²; the solution from 0 is tan t, with a pole at π/2."""
    return FixtureCase(
        name="tangent",
        equation=RiccatiEq.from_constants(1.0, 0.0, 1.0, domain),
        expected_case=CaseKind.AUTONOMOUS,
        y0=0.0,
        t_span=domain,
        y0_list=[0.0, 1.0, "inf"],
        extras={"pole": math.pi / 2.0},
    )


def rescaled(case: FixtureCase, factor: str | Expr) -> RiccatiEq:
    """The fixture's equation with every coefficient multiplied by ``factor``."""
    f = _expr(factor)
    eq = case.equation
    return RiccatiEq(f * eq.b0, f * eq.b1, f * eq.b2, eq.domain)


# ---------------------------------------------------------------------------
# Registered fixtures
# ---------------------------------------------------------------------------

@register_fixture
class AllenSteinFixture(Fixture):
    @property
    def info(self) -> FixtureInfo:
        return FixtureInfo(
            id="allen_stein",
            name="Allen-Stein",
            case=CaseKind.CTU_INTEGRABLE,
            description="b0 = exp(t), b2 = 1 + t^2, invariant 0.5",
        )

    def build(self) -> FixtureCase:
        return allen_stein()


@register_fixture
class RaoUkidaveFixture(Fixture):
    @property
    def info(self) -> FixtureInfo:
        return FixtureInfo(
            id="rao_ukidave",
            name="Rao-Ukidave",
            case=CaseKind.CTU_INTEGRABLE,
            description="b2 = b0/(c v^2), v' = b1 v + k b0; c = 4, k = 1",
        )

    def build(self) -> FixtureCase:
        return rao_ukidave()


@register_fixture
class KovalevskayaFixture(Fixture):
    @property
    def info(self) -> FixtureInfo:
        return FixtureInfo(
            id="kovalevskaya",
            name="Kovalevskaya",
            case=CaseKind.CTU_INTEGRABLE,
            description="F = exp(t), L = 2, K = 4",
        )

    def build(self) -> FixtureCase:
        return kovalevskaya()


@register_fixture
class HongXiangFixture(Fixture):
    @property
    def info(self) -> FixtureInfo:
        return FixtureInfo(
            id="hong_xiang",
            name="Hong-Xiang",
            case=CaseKind.CTU_INTEGRABLE,
            description="G = exp(t), b = 1, c = 4",
        )

    def build(self) -> FixtureCase:
        return hong_xiang()


@register_fixture
class HovyFixture(Fixture):
    @property
    def info(self) -> FixtureInfo:
        return FixtureInfo(
            id="hovy",
            name="Hovy",
            case=CaseKind.LINEARIZABLE_BY_CONSTANT,
            description="n = 2 on (0.5, 5), y(0.5) = 2",
        )

    def build(self) -> FixtureCase:
        return hovy()


@register_fixture
class IbragimovFixture(Fixture):
    @property
    def info(self) -> FixtureInfo:
        return FixtureInfo(
            id="ibragimov",
            name="Ibragimov",
            case=CaseKind.LINEARIZABLE_BY_CONSTANT,
            description="P = 2 + cos(t), Q = 1, k = 3",
        )

    def build(self) -> FixtureCase:
        return ibragimov()


@register_fixture
class AutonomousTwoRootsFixture(Fixture):
    @property
    def info(self) -> FixtureInfo:
        return FixtureInfo(
            id="autonomous_two_roots",
            name="Two equilibria",
            case=CaseKind.AUTONOMOUS,
            description="(-2, 3, -1), equilibria 1 and 2",
        )

    def build(self) -> FixtureCase:
        return autonomous_two_roots()


@register_fixture
class TangentFixture(Fixture):
    @property
    def info(self) -> FixtureInfo:
        return FixtureInfo(
            id="tangent",
            name="Tangent",
            case=CaseKind.AUTONOMOUS,
            description="(1, 0, 1), pole at pi/2",
        )

    def build(self) -> FixtureCase:
        return tangent()
