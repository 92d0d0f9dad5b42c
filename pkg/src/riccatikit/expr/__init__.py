"""Scalar expressions in t: parsing, evaluation and dual-number derivatives."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from riccatikit.errors import DomainError
from riccatikit.expr import dual
from riccatikit.expr.dual import Dual
from riccatikit.expr.grid import Constancy, Grid, constancy, is_constant_on
from riccatikit.expr.nodes import (
    BinOp,
    Call,
    Closure,
    Diff,
    Expr,
    Neg,
    Num,
    Param,
    Pow,
    Var,
)
from riccatikit.expr.parser import parse

logger = logging.getLogger(__name__)

__all__ = [
    "BinOp",
    "Call",
    "Closure",
    "Constancy",
    "DerivResult",
    "Diff",
    "Dual",
    "Expr",
    "Grid",
    "Neg",
    "Num",
    "Param",
    "Pow",
    "Var",
    "absolute",
    "const",
    "constancy",
    "cos",
    "deriv",
    "deriv_info",
    "derivative",
    "evaluate",
    "exp",
    "is_constant_on",
    "ln",
    "parse",
    "render",
    "sin",
    "sqrt",
    "tan",
    "var_t",
]


@dataclass(frozen=True)
class DerivResult:
    value: float
    derivative: float
    nonsmooth: bool = False


def evaluate(e: Expr, t: float) -> float:
    return e.eval(t)


def render(e: Expr) -> str:
    return e.render()


def deriv_info(e: Expr, t: float) -> DerivResult:
    """Value and first derivative at ``t`` with a non-smooth flag."""
    sink, token = dual.collect_nonsmooth()
    try:
        out = e.eval_dual(Dual(float(t), 1.0))
    except DomainError as err:
        if err.t is None:
            raise DomainError(str(err), t=t) from err
        raise
    finally:
        dual.stop_collecting(token)
    value, d = dual.primal(out.re), dual.primal(out.eps)
    if not (math.isfinite(value) and math.isfinite(d)):
        raise DomainError("non-finite derivative", t=t)
    return DerivResult(value, d, bool(sink))


def deriv(e: Expr, t: float) -> float:
    """Forward-mode derivative of ``e`` at ``t``."""
    info = deriv_info(e, t)
    if info.nonsmooth:
        logger.warning("Non-smooth point at t=%.17g; returning the right-derivative", t)
    return info.derivative


def derivative(e: Expr) -> Expr:
    """Expression whose value is the derivative of ``e``."""
    return Diff(e)


def const(value: float | Fraction) -> Expr:
    return Num(float(value))


def var_t() -> Expr:
    return Var()


def exp(e: Expr) -> Expr:
    return Call("exp", e)


def ln(e: Expr) -> Expr:
    return Call("ln", e)


def sqrt(e: Expr) -> Expr:
    return Call("sqrt", e)


def sin(e: Expr) -> Expr:
    return Call("sin", e)


def cos(e: Expr) -> Expr:
    return Call("cos", e)


def tan(e: Expr) -> Expr:
    return Call("tan", e)


def absolute(e: Expr) -> Expr:
    return Call("abs", e)
