"""Tests for SL(2,R), the Möbius action, the Lie algebra and matrix curves."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from riccatikit.algebra.curves import AnalyticCurve, ConstantCurve, TabulatedCurve, intersect
from riccatikit.algebra.extreal import INFINITY, ExtReal, chordal_distance, parse_ext
from riccatikit.algebra.hermite import HermiteTable
from riccatikit.algebra.sl2 import (
    BASIS,
    M0,
    M1,
    M2,
    SL2,
    Sl2Elem,
    commutator,
    matrix_commutator,
    mobius,
)
from riccatikit.errors import DeterminantError, DomainError, InputError
from riccatikit.expr import parse
from riccatikit.expr.nodes import Num
from riccatikit.liegroup.group_path import algebra_matrix


def _rotation(t: float) -> SL2:
    return SL2(math.cos(t), math.sin(t), -math.sin(t), math.cos(t))


class TestSL2:
    """Tests for unit-determinant matrices."""

    def test_determinant_enforced(self) -> None:
        SL2(2.0, 0.0, 0.0, 0.5)
        with pytest.raises(DeterminantError):
            SL2(1.0, 1.0, 1.0, 1.0)

    def test_normalized(self) -> None:
        assert SL2.normalized([[2.0, 0.0], [0.0, 2.0]]) == SL2.identity()
        with pytest.raises(DeterminantError):
            SL2.normalized([[0.0, 1.0], [1.0, 0.0]])

    def test_inverse(self) -> None:
        a = SL2(2.0, 3.0, 1.0, 2.0)
        prod = a @ a.inverse()
        assert np.allclose(prod.as_array(), np.eye(2))

    def test_canonical_sign(self) -> None:
        assert SL2(-1.0, 0.0, 0.0, -1.0).canonical() == SL2.identity()


class TestMobius:
    """Tests for the action on the compactified line."""

    def test_translation(self) -> None:
        shift = SL2(1.0, 2.0, 0.0, 1.0)
        assert mobius(shift, ExtReal(1.0)).value == pytest.approx(3.0)
        assert mobius(shift, INFINITY).is_infinite

    def test_inversion_swaps_zero_and_infinity(self) -> None:
        inv = SL2(0.0, -1.0, 1.0, 0.0)
        assert mobius(inv, ExtReal(0.0)).is_infinite
        assert mobius(inv, INFINITY).value == 0.0
        assert mobius(inv, ExtReal(2.0)).value == pytest.approx(-0.5)

    def test_action_respects_products(self) -> None:
        a = SL2(2.0, 3.0, 1.0, 2.0)
        b = SL2(1.0, 0.0, -4.0, 1.0)
        for y in (ExtReal(-1.3), ExtReal(0.0), ExtReal(0.7), INFINITY):
            lhs = mobius(a @ b, y)
            rhs = mobius(a, mobius(b, y))
            assert chordal_distance(lhs, rhs) < 1e-12


class TestExtReal:
    """Tests for points of R ∪ {∞}."""

    def test_negative_infinity_is_infinity(self) -> None:
        assert ExtReal(-math.inf).is_infinite
        assert str(ExtReal(-math.inf)) == "inf"

    def test_nan_rejected(self) -> None:
        with pytest.raises(InputError):
            ExtReal(math.nan)

    def test_chordal_distance_wraps(self) -> None:
        assert chordal_distance(ExtReal(0.0), INFINITY) == pytest.approx(math.pi)
        assert chordal_distance(ExtReal(-1e12), ExtReal(1e12)) < 1e-11

    def test_parse(self) -> None:
        assert parse_ext("inf").is_infinite
        assert parse_ext("-inf").is_infinite
        assert parse_ext("2.5").value == 2.5
        assert parse_ext(3).value == 3.0
        with pytest.raises(InputError):
            parse_ext("abc")


class TestLieAlgebra:
    """Tests for the basis M0, M1, M2 and its brackets."""

    def test_structure_constants(self) -> None:
        assert commutator(M0, M1) == M0
        assert commutator(M0, M2) == M1.scale(2)
        assert commutator(M1, M2) == M2

    def test_bracket_matches_matrices(self) -> None:
        xs = [Sl2Elem(Fraction(1, 3), Fraction(-2), Fraction(5, 7)), *BASIS]
        ys = [Sl2Elem(Fraction(4), Fraction(1, 2), Fraction(-3, 5)), *BASIS]
        for x in xs:
            for y in ys:
                m = matrix_commutator(x.matrix(), y.matrix())
                assert Sl2Elem.from_matrix(m) == commutator(x, y)

    def test_coefficients_give_the_group_generator(self) -> None:
        b = (0.3, -1.2, 2.5)
        a = np.array(Sl2Elem.from_coefficients(*b).matrix(), dtype=np.float64)
        assert np.allclose(a, algebra_matrix(*b))


class TestCurves:
    """Tests for constant, analytic and tabulated curves."""

    def test_constant_inverse(self) -> None:
        c = ConstantCurve(SL2(2.0, 0.0, 0.0, 0.5))
        assert c.inverse().at(0.0).entries() == (0.5, -0.0, -0.0, 2.0)

    def test_analytic_curve(self) -> None:
        c = AnalyticCurve(parse("exp(t)"), Num(0.0), Num(0.0), parse("exp(-t)"), (0.0, 1.0))
        assert c.at(0.5).alpha == pytest.approx(math.exp(0.5))

    def test_analytic_determinant_checked(self) -> None:
        with pytest.raises(DeterminantError):
            AnalyticCurve(parse("t"), Num(0.0), Num(0.0), Num(1.0), (1.0, 2.0))

    def test_analytic_needs_finite_domain(self) -> None:
        with pytest.raises(InputError, match="finite"):
            AnalyticCurve(Num(1.0), Num(0.0), Num(0.0), Num(1.0), (0.0, math.inf))

    def test_compose(self) -> None:
        a = AnalyticCurve(
            parse("cos(t)"), parse("sin(t)"), parse("-sin(t)"), parse("cos(t)"), (0.0, 2.0)
        )
        b = ConstantCurve(SL2(1.0, 2.0, 0.0, 1.0), (0.0, 3.0))
        ab = a.compose(b)
        assert ab.domain == (0.0, 2.0)
        assert np.allclose(ab.at(0.8).as_array(), (a.at(0.8) @ b.at(0.8)).as_array())

    def test_disjoint_domains(self) -> None:
        with pytest.raises(InputError, match="overlap"):
            intersect((0.0, 1.0), (2.0, 3.0))

    def test_tabulated_rotation(self) -> None:
        times = np.linspace(0.0, 1.0, 41)
        mats = [_rotation(float(t)) for t in times]
        slopes = [
            np.array([[-math.sin(t), math.cos(t)], [-math.cos(t), -math.sin(t)]]) for t in times
        ]
        curve = TabulatedCurve(times, mats, slopes)
        assert np.allclose(curve.at(0.37).as_array(), _rotation(0.37).as_array(), atol=1e-8)
        assert curve.domain == (0.0, 1.0)


class TestHermite:
    """Tests for cubic Hermite tables."""

    def test_reproduces_cubics(self) -> None:
        times = [0.0, 1.0, 2.0]
        values = np.array([t**3 for t in times])
        slopes = np.array([3 * t**2 for t in times])
        table = HermiteTable(times, values, slopes)
        assert table.evaluate(1.5) == pytest.approx(3.375)

    def test_outside_span(self) -> None:
        table = HermiteTable([0.0, 1.0], np.array([0.0, 1.0]), np.array([1.0, 1.0]))
        with pytest.raises(DomainError):
            table.evaluate(1.5)

    def test_bad_knots(self) -> None:
        with pytest.raises(InputError):
            HermiteTable([1.0, 0.0], np.array([0.0, 1.0]), np.array([1.0, 1.0]))
