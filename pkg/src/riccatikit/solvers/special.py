"""Closed forms for the equation dy/dt = −n/t + (1 + n/t)·y − y².

The constant y ≡ 1 solves it; every other solution is

    y(t) = 1 − tⁿ·e^(−t) / (Γ(n+1, t) + K).

With D(t) = tⁿ·e^(−t) the map y' = −(y − 1)/(c2·D) sends it to
dy'/dt = D·c2·y'², solved by y' = 1/(c2·(Γ(n+1, t) + K)). The often quoted
form y' = −1/(Γ(n+1, t) − K) is the same family for c2 = −1.
"""

from __future__ import annotations

import math
from functools import partial

from riccatikit.errors import InputError
from riccatikit.expr import exp, ln
from riccatikit.expr.dual import Number
from riccatikit.expr.nodes import Closure, Expr, Num, Var
from riccatikit.solvers.gamma import upper_gamma


def hovy_coefficients(n: float) -> tuple[Expr, Expr, Expr]:
    t = Var()
    nn = Num(float(n))
    return (-nn / t, 1.0 + nn / t, Num(-1.0))


def hovy_D(n: float) -> Expr:
    """tⁿ·e^(−t), written as exp(n·ln t − t) so non-integer n stays real."""
    t = Var()
    return exp(float(n) * ln(t) - t)


def _d(n: float, t: float) -> float:
    return math.exp(n * math.log(t) - t)


def _solution(n: float, K: float, x: float) -> float:
    t = float(x)
    return 1.0 - _d(n, t) / (upper_gamma(n + 1.0, t) + K)


def hovy_closed_form(n: float, K: float) -> Expr:
    """y(t) = 1 − tⁿe^(−t)/(Γ(n+1,t) + K) as an expression; K = ±inf gives y ≡ 1.

    The node's derivative is the equation's right-hand side evaluated on the
    node, so it can be differentiated like any coefficient.
    """
    if math.isinf(K):
        return Num(1.0)
    value_only = Closure(partial(_solution, float(n), float(K)), label=f"hovy(n={n}, K={K})")
    b0, b1, b2 = hovy_coefficients(n)
    rhs = b0 + b1 * value_only + b2 * value_only * value_only
    return Closure(value_only.fn, derivative=rhs, label=value_only.label)


def hovy_K(n: float, t0: float, y0: float) -> float:
    """K such that the closed form passes through (t0, y0); y0 = 1 gives inf."""
    if not t0 > 0.0:
        raise InputError(f"t0 must be positive, got {t0}")
    if y0 == 1.0:
        return math.inf
    return _d(n, t0) / (1.0 - y0) - upper_gamma(n + 1.0, t0)


def hovy_target_solution(n: float, K: float, c2: float = 1.0) -> Expr:
    """y'(t) = 1/(c2·(Γ(n+1,t) + K)).

    This is the image of the closed form under y' = −(y − 1)/(c2·D).
    """
    if c2 == 0.0:
        raise InputError("c2 must be non-zero")

    def fn(x: Number) -> Number:
        return 1.0 / (c2 * (upper_gamma(n + 1.0, float(x)) + K))

    return Closure(fn, label=f"hovy target (n={n}, K={K}, c2={c2})")


def hovy_printed_target_solution(n: float, K: float) -> Expr:
    """y'(t) = −1/(Γ(n+1,t) − K); solves dy'/dt = −D·y'²."""

    def fn(x: Number) -> Number:
        return -1.0 / (upper_gamma(n + 1.0, float(x)) - K)

    return Closure(fn, label=f"hovy printed target (n={n}, K={K})")
