"""Tests for Riccati equations, target forms and the curve action."""

from __future__ import annotations

import math

import numpy as np
import pytest

from riccatikit.algebra.curves import AnalyticCurve, ConstantCurve
from riccatikit.algebra.extreal import ExtReal
from riccatikit.algebra.sl2 import SL2, mobius
from riccatikit.config import OracleConfig, StepControl
from riccatikit.errors import DomainError, InputError
from riccatikit.expr import Grid, parse
from riccatikit.expr.nodes import Num
from riccatikit.riccati.equation import RiccatiEq, TargetForm
from riccatikit.riccati.transform import push_solution, transform, transform_on_grid
from riccatikit.solvers.oracle import oracle_integrate

TIGHT = StepControl(rtol=1e-11, atol=1e-13)
NO_POLES = OracleConfig(record_poles=False)


def _coeffs(eq: RiccatiEq, t: float) -> tuple[float, float, float]:
    return eq.coefficients_at(t)


class TestRiccatiEq:
    """Tests for the equation type."""

    def test_rhs(self) -> None:
        eq = RiccatiEq.parse("t", "0", "1", domain=(0.0, 1.0))
        assert eq.rhs(0.5, 2.0) == pytest.approx(4.5)

    def test_empty_domain(self) -> None:
        with pytest.raises(InputError, match="Empty domain"):
            RiccatiEq.from_constants(1.0, 0.0, 1.0, (1.0, 1.0))

    def test_coefficients_checked_on_domain(self) -> None:
        with pytest.raises(DomainError):
            RiccatiEq.parse("ln(t)", "0", "1", domain=(-1.0, 1.0))

    def test_flags(self) -> None:
        linear = RiccatiEq.parse("sin(t)", "1", "0", domain=(0.0, 1.0))
        assert linear.is_linear()
        assert not linear.is_autonomous()
        assert not linear.b2_nonvanishing

        auto = RiccatiEq.from_constants(-2.0, 3.0, -1.0, (0.0, 1.0))
        assert auto.is_autonomous()
        assert auto.b0_nonvanishing and auto.b2_nonvanishing

    def test_inverted(self, tangent_eq: RiccatiEq) -> None:
        inv = tangent_eq.inverted()
        # w = -1/tan(t) = -cot(t) solves w' = 1 + w².
        t = 0.8
        w = -1.0 / math.tan(t)
        assert inv.rhs(t, w) == pytest.approx(1.0 / math.sin(t) ** 2)

    def test_render(self) -> None:
        eq = RiccatiEq.parse("a*t", "0", "exp(t)", {"a": 2.0}, (0.0, 1.0))
        assert eq.render() == ("a*t", "0.0", "exp(t)")
        assert "y^2" in str(eq)


class TestTargetForm:
    """Tests for dy/dt = D·(c0 + c1·y + c2·y²)."""

    def test_as_equation(self) -> None:
        eq = TargetForm(parse("exp(t)"), 1.0, 0.0, 1.0).as_equation((0.0, 1.0))
        assert eq.rhs(0.0, 1.0) == pytest.approx(2.0)
        assert isinstance(eq.b1, Num) and eq.b1.value == 0.0

    def test_vanishing_D(self) -> None:
        with pytest.raises(DomainError, match="D vanishes"):
            TargetForm(parse("t"), 1.0, 0.0, 1.0).as_equation((-1.0, 1.0))


class TestTransform:
    """Tests for the action of curves on equations and solutions."""

    def test_constant_scaling(self, tangent_eq: RiccatiEq) -> None:
        r = math.sqrt(2.0)
        out = transform(tangent_eq, ConstantCurve(SL2(r, 0.0, 0.0, 1.0 / r)))
        assert _coeffs(out, 0.3) == pytest.approx((2.0, 0.0, 0.5))

    def test_translation_by_t(self, tangent_eq: RiccatiEq) -> None:
        curve = AnalyticCurve(Num(1.0), parse("t"), Num(0.0), Num(1.0), (0.0, 2.0))
        out = transform(tangent_eq, curve)
        # y' = y + t: dy'/dt = 1 + (y' − t)² + 1.
        t, yp = 0.6, 1.3
        assert out.rhs(t, yp) == pytest.approx(2.0 + (yp - t) ** 2)

    def test_symbolic_matches_grid(self) -> None:
        eq = RiccatiEq.parse("cos(t)", "t", "1 + t^2", domain=(0.0, 2.0))
        curve = AnalyticCurve(
            parse("exp(t)"), parse("t*exp(-t)"), Num(0.0), parse("exp(-t)"), (0.0, 2.0)
        )
        grid = Grid.chebyshev(0.0, 2.0, 32)
        symbolic = transform(eq, curve).sample(grid)
        direct = transform_on_grid(eq, curve, grid)
        assert np.allclose(symbolic, direct, rtol=1e-12, atol=1e-12)

    def test_inverse_curve_undoes_transform(self) -> None:
        eq = RiccatiEq.parse("cos(t)", "t", "1 + t^2", domain=(0.0, 2.0))
        curve = AnalyticCurve(
            parse("cos(t)"), parse("sin(t)"), parse("-sin(t)"), parse("cos(t)"), (0.0, 2.0)
        )
        back = transform(transform(eq, curve), curve.inverse())
        for t in (0.2, 1.0, 1.7):
            assert _coeffs(back, t) == pytest.approx(_coeffs(eq, t), abs=1e-12)

    def test_solutions_map_to_solutions(self, tangent_eq: RiccatiEq) -> None:
        curve = AnalyticCurve(parse("exp(t)"), Num(0.0), Num(0.0), parse("exp(-t)"), (0.0, 2.0))
        target = transform(tangent_eq, curve)
        span = (0.0, 1.0)
        source = oracle_integrate(tangent_eq, ExtReal(0.5), span, t_eval=51)
        z0 = mobius(curve.at(0.0), ExtReal(0.5))
        image = oracle_integrate(target, z0, span, t_eval=51)
        assert push_solution(curve, source).sup_chordal(image) < 1e-7

    def test_domains_intersect(self, tangent_eq: RiccatiEq) -> None:
        curve = ConstantCurve(SL2.identity(), (1.0, 5.0))
        assert transform(tangent_eq, curve).domain == (1.0, 2.0)


def _num(x: float) -> str:
    return f"({float(x)!r})"


def _random_curve(rng: np.random.Generator, domain: tuple[float, float]) -> AnalyticCurve:
    """diag(e^(pt), e^(-pt)) times the shears by f and g, so det is one by construction."""
    p, a0, a1, b0, b1, w1, w2 = rng.uniform(-1.0, 1.0, size=7)
    f = f"{_num(a0)} + {_num(a1)}*sin({_num(2.0 * w1)}*t)"
    g = f"{_num(b0)} + {_num(b1)}*cos({_num(2.0 * w2)}*t)"
    up, down = f"exp({_num(p)}*t)", f"exp(-{_num(p)}*t)"
    return AnalyticCurve(
        parse(f"{up}*(1 + ({f})*({g}))"),
        parse(f"{up}*({f})"),
        parse(f"{down}*({g})"),
        parse(down),
        domain,
    )


def _random_equation(rng: np.random.Generator, domain: tuple[float, float]) -> RiccatiEq:
    c = rng.uniform(-1.0, 1.0, size=6)
    return RiccatiEq.parse(
        f"{_num(c[0])} + {_num(c[1])}*sin(t)",
        f"{_num(c[2])} + {_num(c[3])}*t",
        f"{_num(c[4])} + {_num(c[5])}*cos(t)",
        domain=domain,
    )


@pytest.mark.slow
class TestTransformSweep:
    """Pushed solutions solve the transformed equation for random curves."""

    @pytest.mark.parametrize("seed", range(50))
    def test_pushed_solution_matches_direct_integration(self, seed: int) -> None:
        rng = np.random.default_rng(seed)
        domain = (0.0, 1.0)
        eq = _random_equation(rng, domain)
        curve = _random_curve(rng, domain)
        target = transform(eq, curve)
        y0 = ExtReal(float(rng.normal()))
        source = oracle_integrate(eq, y0, domain, TIGHT, 21, NO_POLES)
        image = oracle_integrate(target, mobius(curve.at(0.0), y0), domain, TIGHT, 21, NO_POLES)
        assert push_solution(curve, source).sup_chordal(image) < 1e-6
