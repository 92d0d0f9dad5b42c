"""Tests for the group equation and the connecting system."""

from __future__ import annotations

import math

import numpy as np
import pytest

from riccatikit.algebra.curves import AnalyticCurve
from riccatikit.algebra.extreal import ExtReal
from riccatikit.config import OracleConfig, StepControl
from riccatikit.errors import DeterminantError
from riccatikit.expr import parse
from riccatikit.expr.nodes import Num
from riccatikit.liegroup.connect import ConnectState, connect_matrix, solve_connect
from riccatikit.liegroup.group_path import (
    algebra_matrix,
    fundamental_solutions,
    reconstruct,
    solve_eLA,
)
from riccatikit.riccati.equation import RiccatiEq
from riccatikit.riccati.transform import transform
from riccatikit.solvers.oracle import oracle_integrate

TIGHT = StepControl(rtol=1e-11, atol=1e-13)
NO_POLES = OracleConfig(record_poles=False)


class TestGroupPath:
    """Tests for Ȧ = a(t)·A and the solutions it carries."""

    def test_tangent_is_a_rotation(self, tangent_eq: RiccatiEq) -> None:
        path = solve_eLA(tangent_eq, (0.0, 1.5), TIGHT, 16)
        for t, m in zip(path.times, path.mats, strict=True):
            expected = (math.cos(t), math.sin(t), -math.sin(t), math.cos(t))
            assert m.entries() == pytest.approx(expected, abs=1e-9)

    def test_determinant_stays_one(self) -> None:
        eq = RiccatiEq.parse("cos(t)", "t", "1 + t^2", domain=(0.0, 2.0))
        path = solve_eLA(eq, (0.0, 2.0), t_eval=41)
        assert path.max_det_error < 1e-12
        assert "max_det_drift" in path.meta
        assert path.meta["stats"]["accepted"] > 0

    def test_reconstruct_through_pole(self, tangent_eq: RiccatiEq) -> None:
        path = solve_eLA(tangent_eq, (0.0, 2.0), TIGHT, 41)
        trace = reconstruct(path, ExtReal(0.0))
        finite = trace.times < 1.5
        assert np.allclose(trace.as_array()[finite], np.tan(trace.times[finite]), rtol=1e-8)
        # tan changes sign across π/2 without any special handling.
        assert trace.values[-1].value < 0.0

    def test_matches_oracle(self) -> None:
        eq = RiccatiEq.parse("cos(t)", "t", "1 + t^2", domain=(0.0, 2.0))
        span = (0.0, 2.0)
        path = solve_eLA(eq, span, TIGHT, 41)
        for y0 in (ExtReal(-0.5), ExtReal(0.3)):
            oracle = oracle_integrate(eq, y0, span, t_eval=41, oracle=NO_POLES)
            assert reconstruct(path, y0).sup_chordal(oracle) < 1e-6

    def test_fundamental_solutions(self, tangent_eq: RiccatiEq) -> None:
        path = solve_eLA(tangent_eq, (0.0, 1.0), TIGHT, 11)
        zero, inf, one = fundamental_solutions(path)
        assert zero.y0.value == 0.0
        assert inf.y0.is_infinite
        assert one.y0.value == pytest.approx(1.0)
        t = inf.times[1:]
        assert np.allclose(inf.as_array()[1:], -1.0 / np.tan(t), rtol=1e-8)
        assert np.allclose(one.as_array(), np.tan(one.times + math.pi / 4), rtol=1e-6)

    def test_as_curve_interpolates(self, tangent_eq: RiccatiEq) -> None:
        curve = solve_eLA(tangent_eq, (0.0, 1.0), TIGHT, 41).as_curve()
        t = 0.4321
        assert curve.at(t).beta == pytest.approx(math.sin(t), abs=1e-7)


class TestConnect:
    """Tests for the system carrying one equation into another."""

    def test_matrix_is_the_commutator_action(self) -> None:
        b, bp = (0.4, -1.1, 2.3), (-0.7, 0.5, 1.9)
        x = np.array([[1.2, -0.3], [0.8, 0.6]])
        a, ap = algebra_matrix(*b), algebra_matrix(*bp)
        expected = (ap @ x - x @ a).reshape(4)
        assert np.allclose(connect_matrix(b, bp) @ x.reshape(4), expected)

    def test_identity_connects_an_equation_to_itself(self) -> None:
        eq = RiccatiEq.parse("sin(t)", "t", "2 + cos(t)", domain=(0.0, 3.0))
        path = solve_connect(eq, eq, ConnectState(1.0, 0.0, 0.0, 1.0), (0.0, 3.0), t_eval=31)
        assert path.max_offdiagonal < 1e-12
        assert np.allclose(path.states[:, 0], 1.0)
        assert np.allclose(path.states[:, 3], 1.0)

    def test_determinant_is_conserved(self) -> None:
        eq = RiccatiEq.parse("sin(t)", "t", "2 + cos(t)", domain=(0.0, 3.0))
        target = RiccatiEq.parse("1", "0", "exp(-t)", domain=(0.0, 3.0))
        path = solve_connect(eq, target, [2.0, 1.0, 1.0, 1.5], (0.0, 3.0), TIGHT, 31)
        assert path.dets[0] == pytest.approx(2.0)
        assert path.max_det_drift < 1e-8
        assert path.meta["max_det_drift"] == path.max_det_drift

    def test_recovers_the_transforming_curve(self, tangent_eq: RiccatiEq) -> None:
        curve = AnalyticCurve(parse("exp(t)"), Num(0.0), Num(0.0), parse("exp(-t)"), (0.0, 2.0))
        target = transform(tangent_eq, curve)
        x0 = curve.at(0.0).entries()
        path = solve_connect(tangent_eq, target, x0, (0.0, 1.5), TIGHT, 16)
        for i, t in enumerate(path.times):
            state = path.state(i)
            assert state.alpha == pytest.approx(math.exp(t), rel=1e-8)
            assert state.delta == pytest.approx(math.exp(-t), rel=1e-8)
        assert path.max_offdiagonal < 1e-10
        knot = path.as_curve().at(0.75)
        assert knot.alpha == pytest.approx(math.exp(0.75), rel=1e-6)

    def test_curve_takes_positive_trace(self, tangent_eq: RiccatiEq) -> None:
        path = solve_connect(tangent_eq, tangent_eq, [-1.0, 0.0, 0.0, -1.0], (0.0, 1.0), t_eval=5)
        curve = path.as_curve()
        assert curve.at(0.0).entries() == pytest.approx((1.0, 0.0, 0.0, 1.0))
        assert curve.at(1.0).entries() == pytest.approx((1.0, 0.0, 0.0, 1.0))

    def test_non_positive_determinant_cannot_be_normalized(self, tangent_eq: RiccatiEq) -> None:
        path = solve_connect(tangent_eq, tangent_eq, [1.0, 0.0, 0.0, -1.0], (0.0, 1.0), t_eval=5)
        assert path.dets[0] == pytest.approx(-1.0)
        with pytest.raises(DeterminantError, match="normalize"):
            path.as_curve()


def _oscillating_equation(rng: np.random.Generator, domain: tuple[float, float]) -> RiccatiEq:
    """b0·b2 > 0 throughout, so solutions of the group equation stay bounded."""
    c = [f"({float(x)!r})" for x in rng.uniform(-0.3, 0.3, size=3)]
    return RiccatiEq.parse(
        f"1 + {c[0]}*sin(t)", f"{c[1]}*cos(t)", f"1 + {c[2]}*cos(t)", domain=domain
    )


@pytest.mark.slow
class TestConnectSweep:
    """The connecting system keeps det x = 1 over long spans."""

    @pytest.mark.parametrize("seed", range(20))
    def test_determinant_over_a_long_span(self, seed: int) -> None:
        rng = np.random.default_rng(seed)
        span = (0.0, 10.0)
        eq, target = _oscillating_equation(rng, span), _oscillating_equation(rng, span)
        alpha = float(rng.uniform(0.5, 2.0))
        beta, gamma = (float(v) for v in rng.uniform(-1.0, 1.0, size=2))
        x0 = [alpha, beta, gamma, (1.0 + beta * gamma) / alpha]
        path = solve_connect(eq, target, x0, span, TIGHT, 101)
        assert abs(path.dets[0] - 1.0) < 1e-12
        assert float(np.max(np.abs(path.dets - 1.0))) <= 1e-9
