"""Tests for quadrature, the closed-form solvers, Γ(a, t) and the oracle."""

from __future__ import annotations

import math

import numpy as np
import pytest

from riccatikit.algebra.extreal import INFINITY, ExtReal
from riccatikit.config import OracleConfig, StepControl
from riccatikit.errors import GridMismatchError, InputError, NumericalError, QuadratureError
from riccatikit.expr import deriv, parse
from riccatikit.expr.nodes import Num
from riccatikit.riccati.equation import RiccatiEq, TargetForm
from riccatikit.solvers.autonomous import (
    discriminant,
    equilibria,
    flow,
    is_near_degenerate,
    solve_autonomous,
)
from riccatikit.solvers.gamma import upper_gamma, upper_gamma_integer
from riccatikit.solvers.linear import LinearEq, linear_closure, output_times, solve_linear
from riccatikit.solvers.oracle import oracle_integrate
from riccatikit.solvers.quadrature import cumulative, quad
from riccatikit.solvers.rk import EmbeddedRungeKutta
from riccatikit.solvers.special import (
    hovy_closed_form,
    hovy_coefficients,
    hovy_D,
    hovy_K,
    hovy_printed_target_solution,
    hovy_target_solution,
)
from riccatikit.solvers.trace import SolutionTrace


class TestQuadrature:
    """Tests for adaptive Gauss-Kronrod quadrature."""

    def test_smooth(self) -> None:
        assert quad(parse("sin(t)"), 0.0, math.pi).value == pytest.approx(2.0, rel=1e-12)

    def test_reversed_limits(self) -> None:
        assert quad(parse("t"), 1.0, 0.0).value == pytest.approx(-0.5)

    def test_endpoint_singularity(self) -> None:
        r = quad(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0)
        assert r.value == pytest.approx(2.0, rel=1e-8)
        assert r.subdivisions > 1

    def test_subdivision_limit(self) -> None:
        with pytest.raises(QuadratureError):
            quad(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0, limit=2)

    def test_cumulative(self) -> None:
        out = cumulative(Num(1.0), [0.0, 1.0, 2.5])
        assert np.allclose(out, [0.0, 1.0, 2.5])


class TestUpperGamma:
    """Tests for Γ(a, t)."""

    def test_integer_closed_form(self) -> None:
        assert upper_gamma_integer(2, 1.0) == pytest.approx(5.0 / math.e)
        assert upper_gamma(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)

    def test_quadrature_matches_closed_form(self) -> None:
        for t in (0.5, 3.0, 12.0):
            assert upper_gamma(3.0, t) == pytest.approx(upper_gamma_integer(2, t), rel=1e-11)

    @pytest.mark.parametrize("a", [0.5, 2.5, 7.2])
    @pytest.mark.parametrize("t", [0.1, 1.0, 5.0, 20.0])
    def test_against_scipy(self, a: float, t: float) -> None:
        special = pytest.importorskip("scipy.special")
        expected = float(special.gammaincc(a, t) * special.gamma(a))
        assert upper_gamma(a, t) == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("seed", range(4))
    def test_recurrence(self, seed: int) -> None:
        # Γ(a, t) = (a − 1)·Γ(a − 1, t) + t^(a−1)·e^(−t)
        rng = np.random.default_rng(seed)
        for a, t in zip(rng.uniform(0.5, 6.0, 25), rng.uniform(0.1, 10.0, 25), strict=True):
            a, t = float(a), float(t)
            rhs = (a - 1.0) * upper_gamma(a - 1.0, t) + t ** (a - 1.0) * math.exp(-t)
            assert upper_gamma(a, t) == pytest.approx(rhs, rel=1e-12)

    def test_integer_orders_against_closed_form(self) -> None:
        rng = np.random.default_rng(11)
        for t in rng.uniform(0.1, 10.0, 20):
            for n in range(6):
                expected = upper_gamma_integer(n, float(t))
                assert upper_gamma(n + 1.0, float(t)) == pytest.approx(expected, rel=1e-11)

    def test_requires_positive_t(self) -> None:
        with pytest.raises(InputError):
            upper_gamma(2.0, 0.0)
        with pytest.raises(InputError):
            upper_gamma_integer(-1, 1.0)


class TestLinear:
    """Tests for the quadrature solution of linear equations."""

    def test_constant_coefficients(self) -> None:
        trace = solve_linear(LinearEq(Num(1.0), Num(1.0)), 0.0, (0.0, 1.0), 11)
        expected = np.exp(trace.times) - 1.0
        assert np.allclose(trace.as_array(), expected, rtol=1e-11)

    def test_time_dependent(self) -> None:
        eq = LinearEq(parse("2*t"), parse("-2*t"))
        trace = solve_linear(eq, 3.0, (0.0, 2.0), 21)
        expected = 1.0 + 2.0 * np.exp(-trace.times**2)
        assert np.allclose(trace.as_array(), expected, rtol=1e-10)

    def test_infinite_start(self) -> None:
        with pytest.raises(InputError, match="finite"):
            solve_linear(LinearEq(Num(1.0), Num(1.0)), INFINITY, (0.0, 1.0))

    def test_closure_derivative_is_the_equation(self) -> None:
        eq = LinearEq(parse("cos(t)"), parse("-t"))
        y = linear_closure(eq, 0.0, 1.0, np.linspace(0.0, 2.0, 201))
        t = 1.3
        assert deriv(y, t) == pytest.approx(eq.rhs(t, y.eval(t)), rel=1e-12)

    def test_output_times(self) -> None:
        assert output_times((0.0, 1.0), 5).tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
        with pytest.raises(InputError, match="forward"):
            output_times((1.0, 0.0), 5)
        with pytest.raises(InputError):
            output_times((0.0, 1.0), [0.1, 0.5])


class TestAutonomous:
    """Tests for the closed-form flow of constant-coefficient equations."""

    def test_equilibria(self) -> None:
        assert equilibria(-2.0, 3.0, -1.0) == pytest.approx([1.0, 2.0])
        assert equilibria(1.0, 0.0, 1.0) == []
        assert discriminant(1.0, 0.0, 1.0) == -4.0

    def test_flow_is_rotation(self) -> None:
        f = flow(1.0, 0.0, 1.0, 0.4)
        assert f.entries() == pytest.approx(
            (math.cos(0.4), math.sin(0.4), -math.sin(0.4), math.cos(0.4))
        )

    def test_tangent(self) -> None:
        trace = solve_autonomous(1.0, 0.0, 1.0, Num(1.0), ExtReal(0.0), (0.0, 1.5), 16)
        assert np.allclose(trace.as_array(), np.tan(trace.times), rtol=1e-12, atol=1e-14)

    def test_start_at_infinity(self) -> None:
        trace = solve_autonomous(1.0, 0.0, 1.0, Num(1.0), INFINITY, (0.0, 1.0), 11)
        assert trace.y0.is_infinite
        assert trace.values[-1].value == pytest.approx(-1.0 / math.tan(1.0))

    def test_two_roots(self) -> None:
        trace = solve_autonomous(-2.0, 3.0, -1.0, Num(1.0), ExtReal(1.5), (0.0, 2.0), 21)
        # y = (2·e^t + 1)/(e^t + 1) from y(0) = 1.5.
        e = np.exp(trace.times)
        assert np.allclose(trace.as_array(), (2.0 * e + 1.0) / (e + 1.0), rtol=1e-12)

    def test_time_factor(self) -> None:
        trace = solve_autonomous(1.0, 0.0, 1.0, parse("2*t"), ExtReal(0.0), (0.0, 1.0), 11)
        assert np.allclose(trace.as_array(), np.tan(trace.times**2), rtol=1e-11)

    def test_tangent_pole_is_recorded(self) -> None:
        trace = solve_autonomous(1.0, 0.0, 1.0, Num(1.0), ExtReal(0.0), (0.0, 2.0), 21)
        assert trace.pole_times == pytest.approx([math.pi / 2.0], rel=1e-12)
        assert len(trace) == 21
        assert not any(v.is_infinite for v in trace.values)

    def test_pole_samples_are_inserted_on_request(self) -> None:
        trace = solve_autonomous(
            1.0, 0.0, 1.0, Num(1.0), ExtReal(0.0), (0.0, 2.0), 21, record_poles=True
        )
        assert len(trace) == 22
        infinite = [
            float(t) for t, v in zip(trace.times, trace.values, strict=True) if v.is_infinite
        ]
        assert infinite == pytest.approx([math.pi / 2.0], rel=1e-12)
        assert trace.values[-1].value == pytest.approx(math.tan(2.0), rel=1e-10)

    def test_pole_under_a_time_factor(self) -> None:
        trace = solve_autonomous(1.0, 0.0, 1.0, parse("2*t"), ExtReal(0.0), (0.0, 1.5), 16)
        assert trace.pole_times == pytest.approx([math.sqrt(math.pi / 2.0)], rel=1e-9)

    def test_two_roots_pole(self) -> None:
        # (y - 1)/(y - 2) = e^t/2 reaches 1 at t = ln 2.
        trace = solve_autonomous(-2.0, 3.0, -1.0, Num(1.0), ExtReal(0.0), (0.0, 2.0), 21)
        assert trace.pole_times == pytest.approx([math.log(2.0)], rel=1e-12)

    def test_no_pole_after_starting_at_infinity(self) -> None:
        trace = solve_autonomous(1.0, 0.0, 1.0, Num(1.0), INFINITY, (0.0, 1.0), 11)
        assert trace.pole_times == []

    def test_near_degenerate_uses_oracle(self) -> None:
        c1 = 2.0 * (1.0 + 1e-10)
        assert is_near_degenerate(1.0, c1, 1.0)
        trace = solve_autonomous(1.0, c1, 1.0, Num(1.0), ExtReal(0.0), (0.0, 0.5), 11)
        assert trace.meta["method"] == "oracle"
        t = trace.times
        assert np.allclose(trace.as_array(), t / (1.0 - t), rtol=1e-6)


def _autonomous_draw(seed: int) -> tuple[float, float, float, str, ExtReal]:
    """Coefficients with Δ > 0, Δ = 0 or Δ < 0 depending on ``seed % 3``."""
    rng = np.random.default_rng(seed)
    c2 = float(rng.uniform(0.5, 1.5)) * float(rng.choice([-1.0, 1.0]))
    m = float(rng.uniform(-1.0, 1.0))
    kind = seed % 3
    if kind == 0:
        half = float(rng.uniform(0.2, 1.0))
        c0, c1 = c2 * (m * m - half * half), -2.0 * c2 * m
    elif kind == 1:
        c0, c1 = c2 * m * m, -2.0 * c2 * m
    else:
        q = float(rng.uniform(0.5, 1.5))
        c0, c1 = c2 * (m * m + q * q), -2.0 * c2 * m
    D = ("1", "1 + 0.5*sin(t)", "exp(-t/4)")[int(rng.integers(3))]
    return c0, c1, c2, D, ExtReal(float(rng.normal(scale=2.0)))


@pytest.mark.slow
class TestAutonomousSweep:
    """Closed-form flows against direct integration across all discriminant signs."""

    SEEDS = range(30)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_matches_oracle(self, seed: int) -> None:
        c0, c1, c2, D, y0 = _autonomous_draw(seed)
        span = (0.0, 3.0)
        trace = solve_autonomous(c0, c1, c2, parse(D), y0, span, 61)
        eq = TargetForm(parse(D), c0, c1, c2).as_equation(span, check=False)
        oracle = OracleConfig(record_poles=False)
        ref = oracle_integrate(eq, y0, span, StepControl(rtol=1e-11, atol=1e-13), 61, oracle)
        assert trace.sup_chordal(ref) < 1e-6

    def test_draws_cover_every_sign_and_pass_poles(self) -> None:
        signs = set()
        passages = 0
        for seed in self.SEEDS:
            c0, c1, c2, D, y0 = _autonomous_draw(seed)
            signs.add(int(np.sign(round(discriminant(c0, c1, c2), 9))))
            passages += len(solve_autonomous(c0, c1, c2, parse(D), y0, (0.0, 3.0), 61).pole_times)
        assert signs == {-1, 0, 1}
        assert passages >= 3


class TestRungeKutta:
    """Tests for the embedded Dormand-Prince integrator."""

    def test_exponential_decay(self) -> None:
        rk = EmbeddedRungeKutta(StepControl(rtol=1e-10, atol=1e-12))
        result = rk.integrate(lambda t, y: -y, (0.0, 1.0), [1.0], [0.0, 0.5, 1.0])
        assert result.times.tolist() == [0.0, 0.5, 1.0]
        assert result.states[-1, 0] == pytest.approx(math.exp(-1.0), rel=1e-9)

    def test_backwards(self) -> None:
        rk = EmbeddedRungeKutta()
        result = rk.integrate(lambda t, y: -y, (1.0, 0.0), [1.0])
        assert result.states[-1, 0] == pytest.approx(math.e, rel=1e-8)

    def test_step_budget(self) -> None:
        rk = EmbeddedRungeKutta(StepControl(max_steps=5))
        with pytest.raises(NumericalError, match="budget"):
            rk.integrate(lambda t, y: np.cos(50.0 * t) * y, (0.0, 10.0), [1.0])

    def test_unordered_output_times(self) -> None:
        rk = EmbeddedRungeKutta()
        with pytest.raises(InputError):
            rk.integrate(lambda t, y: -y, (0.0, 1.0), [1.0], [0.5, 0.2])

    def test_stats(self) -> None:
        result = EmbeddedRungeKutta().integrate(lambda t, y: -y, (0.0, 1.0), [1.0])
        stats = result.stats.as_dict()
        assert set(stats) == {"accepted", "rejected", "evaluations", "h_min", "h_max"}
        assert stats["accepted"] > 0


class TestOracle:
    """Tests for the chart-switching reference integrator."""

    def test_passes_through_pole(self, tangent_eq: RiccatiEq) -> None:
        trace = oracle_integrate(tangent_eq, ExtReal(0.0), (0.0, 2.0), t_eval=201)
        assert len(trace.pole_times) == 1
        assert trace.pole_times[0] == pytest.approx(math.pi / 2.0, abs=1e-8)
        assert any(v.is_infinite for v in trace.values)
        assert trace.values[-1].value == pytest.approx(math.tan(2.0), rel=1e-7)
        assert len(trace.switches) >= 1

    def test_pole_samples_optional(self, tangent_eq: RiccatiEq) -> None:
        oracle = OracleConfig(record_poles=False)
        trace = oracle_integrate(tangent_eq, ExtReal(0.0), (0.0, 2.0), t_eval=201, oracle=oracle)
        assert len(trace) == 201
        assert len(trace.pole_times) == 1

    def test_start_at_infinity(self, tangent_eq: RiccatiEq) -> None:
        trace = oracle_integrate(tangent_eq, INFINITY, (0.0, 1.0), t_eval=11)
        assert trace.y0.is_infinite
        assert trace.values[-1].value == pytest.approx(-1.0 / math.tan(1.0), rel=1e-7)

    def test_residual_recorded(self, tangent_eq: RiccatiEq) -> None:
        trace = oracle_integrate(tangent_eq, ExtReal(0.0), (0.0, 1.0), t_eval=11)
        assert trace.residual is not None and trace.residual < 1e-4
        assert trace.meta["method"] == "oracle"


class TestSolutionTrace:
    """Tests for trace comparison."""

    def test_lengths_must_match(self) -> None:
        with pytest.raises(InputError):
            SolutionTrace(np.array([0.0, 1.0]), [ExtReal(0.0)])

    def test_grid_mismatch(self) -> None:
        a = SolutionTrace.constant([0.0, 1.0], ExtReal(0.0))
        b = SolutionTrace.constant([0.0, 2.0], ExtReal(0.0))
        with pytest.raises(GridMismatchError):
            a.sup_chordal(b)

    def test_sup_abs_skips_large_values(self) -> None:
        a = SolutionTrace(np.array([0.0, 1.0, 2.0]), [ExtReal(0.0), ExtReal(5e3), INFINITY])
        b = SolutionTrace(np.array([0.0, 1.0, 2.0]), [ExtReal(0.1), ExtReal(6e3), ExtReal(1.0)])
        assert a.sup_abs(b) == pytest.approx(0.1)
        assert a.sup_chordal(b) > 0.1


class TestHovyClosedForm:
    """Tests for the closed forms of dy/dt = −n/t + (1 + n/t)·y − y²."""

    def test_passes_through_initial_value(self) -> None:
        K = hovy_K(2.0, 0.5, 2.0)
        assert hovy_closed_form(2.0, K).eval(0.5) == pytest.approx(2.0, rel=1e-12)

    def test_solves_the_equation(self) -> None:
        K = hovy_K(2.0, 0.5, 2.0)
        y = hovy_closed_form(2.0, K)
        eq = RiccatiEq(*hovy_coefficients(2.0), (0.5, 5.0))
        h = 1e-5
        for t in (1.0, 2.5, 4.0):
            slope = (y.eval(t + h) - y.eval(t - h)) / (2.0 * h)
            assert slope == pytest.approx(eq.rhs(t, y.eval(t)), rel=1e-6)

    def test_constant_solution(self) -> None:
        assert hovy_K(2.0, 0.5, 1.0) == math.inf
        assert hovy_closed_form(2.0, math.inf).eval(3.0) == 1.0

    def test_target_solution_is_the_image(self) -> None:
        n = 2.0
        K = hovy_K(n, 0.5, 2.0)
        y = hovy_closed_form(n, K)
        D = hovy_D(n)
        for c2 in (1.0, -1.0):
            target = hovy_target_solution(n, K, c2)
            t = 1.7
            image = -(y.eval(t) - 1.0) / (c2 * D.eval(t))
            assert target.eval(t) == pytest.approx(image, rel=1e-10)

    def test_printed_form_is_the_negative_c2_family(self) -> None:
        K = 0.3
        printed = hovy_printed_target_solution(2.0, K)
        assert printed.eval(1.2) == pytest.approx(hovy_target_solution(2.0, -K, -1.0).eval(1.2))
