"""Tests for expression parsing, evaluation and derivatives."""

from __future__ import annotations

import math

import numpy as np
import pytest

from riccatikit.errors import DomainError, ExprSyntaxError, InputError, UnknownIdentifierError
from riccatikit.expr import (
    Closure,
    Grid,
    Num,
    Var,
    deriv,
    deriv_info,
    is_constant_on,
    parse,
)


class TestParse:
    """Tests for the expression grammar."""

    def test_polynomial(self) -> None:
        assert parse("t^2 + 3*t").eval(2.0) == pytest.approx(10.0)

    def test_precedence(self) -> None:
        assert parse("1 + 2*3^2").eval(0.0) == pytest.approx(19.0)
        assert parse("-t^2").eval(3.0) == pytest.approx(-9.0)
        assert parse("1 - (t - 2)").eval(0.0) == pytest.approx(3.0)

    def test_functions(self) -> None:
        e = parse("exp(-t)*sin(2*t)/(1 + t^2)")
        t = 0.7
        assert e.eval(t) == pytest.approx(math.exp(-t) * math.sin(2 * t) / (1 + t * t))

    def test_negative_integer_exponent(self) -> None:
        assert parse("t^-1").eval(4.0) == pytest.approx(0.25)

    def test_rational_exponent_of_negative_base(self) -> None:
        assert parse("t^(1/3)").eval(-8.0) == pytest.approx(-2.0)

    def test_even_root_of_negative_base(self) -> None:
        with pytest.raises(DomainError):
            parse("t^0.5").eval(-1.0)

    def test_constants(self) -> None:
        assert parse("sin(pi/2)").eval(0.0) == pytest.approx(1.0)
        assert parse("ln(e)").eval(0.0) == pytest.approx(1.0)

    def test_parameters(self) -> None:
        e = parse("a*t + b", {"a": 2.0, "b": 1.0})
        assert e.eval(3.0) == pytest.approx(7.0)
        assert e.params == {"a": 2.0, "b": 1.0}

    def test_t_cannot_be_a_parameter(self) -> None:
        with pytest.raises(InputError, match="independent variable"):
            parse("t", {"t": 1.0})

    def test_syntax_error_offset(self) -> None:
        with pytest.raises(ExprSyntaxError) as exc:
            parse("1 + * t")
        assert exc.value.offset == 4

    def test_empty_expression(self) -> None:
        with pytest.raises(ExprSyntaxError, match="Empty"):
            parse("   ")

    def test_unbalanced_parenthesis(self) -> None:
        with pytest.raises(ExprSyntaxError):
            parse("(t + 1")

    def test_non_constant_exponent(self) -> None:
        with pytest.raises(ExprSyntaxError, match="constant"):
            parse("t^t")

    def test_unknown_identifier(self) -> None:
        with pytest.raises(UnknownIdentifierError) as exc:
            parse("foo + t")
        assert exc.value.name == "foo"
        assert exc.value.offset == 0

    def test_unknown_function(self) -> None:
        with pytest.raises(UnknownIdentifierError) as exc:
            parse("2*bar(t)")
        assert exc.value.name == "bar"
        assert exc.value.offset == 2


class TestRender:
    """Rendering produces text that parses back to the same function."""

    @pytest.mark.parametrize(
        "src",
        [
            "exp(-t)*sin(2*t)/(1 + t^2) - 3*t^(1/3)",
            "1 - (t - 2)",
            "-(t + 1)^2",
            "a*cos(t) + sqrt(abs(t))",
        ],
    )
    def test_round_trip(self, src: str) -> None:
        params = {"a": 1.5}
        e = parse(src, params)
        back = parse(e.render(), params)
        for t in (0.3, 1.1, 2.5):
            assert back.eval(t) == pytest.approx(e.eval(t), rel=1e-14)

    def test_simple_forms(self) -> None:
        assert parse("t").render() == "t"
        assert parse("exp(t)").render() == "exp(t)"
        assert parse("diff(t^2)").render() == "diff(t^2)"

    def test_negative_literal_base(self) -> None:
        assert (Num(-2.0) ** 2).render() == "(-2.0)^2"

    def test_operators_build_trees(self) -> None:
        t = Var()
        assert (t * 2 + 1).eval(3.0) == pytest.approx(7.0)
        assert (1 - t).eval(3.0) == pytest.approx(-2.0)
        assert (t**0.5).render() == "t^0.5"

    def test_non_finite_literal(self) -> None:
        with pytest.raises(InputError):
            Num(math.inf)

    def test_closure_has_no_text(self) -> None:
        c = Closure(lambda x: 2.0 * x, label="double")
        with pytest.raises(InputError, match="double"):
            c.render()
        assert "Closure" in str(c)


class TestDomain:
    """Evaluation outside the domain raises DomainError with the time."""

    def test_log_of_zero(self) -> None:
        with pytest.raises(DomainError) as exc:
            parse("ln(t)").eval(0.0)
        assert exc.value.t == 0.0

    def test_division_by_zero(self) -> None:
        with pytest.raises(DomainError):
            parse("1/t").eval(0.0)

    def test_overflow(self) -> None:
        with pytest.raises(DomainError):
            parse("exp(t)").eval(1000.0)


class TestDerivatives:
    """Tests for forward-mode derivatives."""

    def test_first_derivative(self) -> None:
        assert deriv(parse("sin(t)"), 0.3) == pytest.approx(math.cos(0.3))

    def test_quotient(self) -> None:
        t = 0.8
        expected = (2 * t * (1 + t) - t * t) / (1 + t) ** 2
        assert deriv(parse("t^2/(1 + t)"), t) == pytest.approx(expected)

    def test_diff_node_differentiates_again(self) -> None:
        e = parse("diff(t^3)")
        assert e.eval(2.0) == pytest.approx(12.0)
        assert deriv(e, 2.0) == pytest.approx(12.0)

    def test_abs_kink_is_flagged(self) -> None:
        info = deriv_info(parse("abs(t)"), 0.0)
        assert info.nonsmooth
        assert info.derivative == pytest.approx(1.0)
        assert not deriv_info(parse("abs(t)"), -1.0).nonsmooth

    def test_sqrt_at_zero(self) -> None:
        with pytest.raises(DomainError):
            deriv(parse("sqrt(t)"), 0.0)

    def test_closure_with_derivative(self) -> None:
        c = Closure(math.exp, derivative=Closure(math.exp, label="exp'"), label="exp")
        assert deriv(c, 1.0) == pytest.approx(math.e)


class TestGrid:
    """Tests for sample grids and constancy checks."""

    def test_chebyshev_is_interior(self) -> None:
        g = Grid.chebyshev(0.0, 1.0, 16)
        assert len(g) == 16
        assert 0.0 < g.lo < g.hi < 1.0
        assert np.all(np.diff(g.points) > 0.0)

    def test_uniform_midpoints(self) -> None:
        g = Grid.uniform(0.0, 1.0, 10)
        assert g.points[0] == pytest.approx(0.05)
        assert g.points[-1] == pytest.approx(0.95)

    def test_too_few_points(self) -> None:
        with pytest.raises(InputError, match="at least"):
            Grid(np.arange(4.0))

    def test_unknown_kind(self) -> None:
        with pytest.raises(InputError, match="Unknown grid kind"):
            Grid.build(0.0, 1.0, 16, 1e-8, "random")

    def test_unbounded_domain(self) -> None:
        with pytest.raises(InputError):
            Grid.chebyshev(0.0, math.inf)

    def test_constancy(self) -> None:
        g = Grid.chebyshev(0.0, 3.0, 64)
        assert is_constant_on(parse("sin(t)^2 + cos(t)^2"), g).ok
        assert not is_constant_on(parse("sin(t)"), g).ok
