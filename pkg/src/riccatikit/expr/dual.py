"""Forward-mode dual numbers and domain-checked elementary functions.

A ``Dual`` holds a primal part and a tangent part, either of which may itself
be a ``Dual``; nesting two levels gives second derivatives. Every function in
this module accepts plain floats or duals and raises ``DomainError`` instead of
returning NaN or infinity.
"""

from __future__ import annotations

import math
from contextvars import ContextVar
from fractions import Fraction
from typing import Union

from riccatikit.errors import DomainError

Number = Union[float, "Dual"]

# Collects primal points where abs() was differentiated at its kink.
_NONSMOOTH: ContextVar[list[float] | None] = ContextVar("_NONSMOOTH", default=None)


def primal(x: Number) -> float:
    """Return the innermost real part of a (possibly nested) dual."""
    while isinstance(x, Dual):
        x = x.re
    return float(x)


class Dual:
    """Dual number ``re + eps * ε`` with ``ε² = 0``."""

    __slots__ = ("re", "eps")

    def __init__(self, re: Number, eps: Number = 0.0) -> None:
        self.re = re
        self.eps = eps

    def __repr__(self) -> str:
        return f"Dual({self.re!r}, {self.eps!r})"

    def __add__(self, other: Number) -> Dual:
        if isinstance(other, Dual):
            return Dual(self.re + other.re, self.eps + other.eps)
        return Dual(self.re + other, self.eps)

    __radd__ = __add__

    def __sub__(self, other: Number) -> Dual:
        if isinstance(other, Dual):
            return Dual(self.re - other.re, self.eps - other.eps)
        return Dual(self.re - other, self.eps)

    def __rsub__(self, other: Number) -> Dual:
        return Dual(other - self.re, -self.eps)

    def __mul__(self, other: Number) -> Dual:
        if isinstance(other, Dual):
            return Dual(self.re * other.re, self.re * other.eps + self.eps * other.re)
        return Dual(self.re * other, self.eps * other)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> Dual:
        if isinstance(other, Dual):
            q = div(self.re, other.re)
            return Dual(q, div(self.eps - q * other.eps, other.re))
        return Dual(div(self.re, other), div(self.eps, other))

    def __rtruediv__(self, other: Number) -> Dual:
        q = div(other, self.re)
        return Dual(q, div(-q * self.eps, self.re))

    def __neg__(self) -> Dual:
        return Dual(-self.re, -self.eps)


def div(a: Number, b: Number) -> Number:
    """Division that raises on a zero denominator."""
    if isinstance(a, Dual) or isinstance(b, Dual):
        return a / b
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


def exp(x: Number) -> Number:
    if isinstance(x, Dual):
        e = exp(x.re)
        return Dual(e, e * x.eps)
    try:
        return math.exp(x)
    except OverflowError as e:
        raise DomainError(f"exp overflow for argument {x:.6g}") from e


def ln(x: Number) -> Number:
    if isinstance(x, Dual):
        return Dual(ln(x.re), div(x.eps, x.re))
    if x <= 0.0:
        raise DomainError(f"ln of non-positive value {x:.6g}")
    return math.log(x)


def sqrt(x: Number) -> Number:
    if isinstance(x, Dual):
        r = sqrt(x.re)
        if primal(r) == 0.0:
            raise DomainError("sqrt is not differentiable at 0")
        return Dual(r, div(x.eps, 2.0 * r))
    if x < 0.0:
        raise DomainError(f"sqrt of negative value {x:.6g}")
    return math.sqrt(x)


def sin(x: Number) -> Number:
    if isinstance(x, Dual):
        return Dual(sin(x.re), cos(x.re) * x.eps)
    return math.sin(x)


def cos(x: Number) -> Number:
    if isinstance(x, Dual):
        return Dual(cos(x.re), -sin(x.re) * x.eps)
    return math.cos(x)


def tan(x: Number) -> Number:
    if isinstance(x, Dual):
        t = tan(x.re)
        return Dual(t, (1.0 + t * t) * x.eps)
    if math.cos(x) == 0.0:
        raise DomainError(f"tan pole at {x:.6g}")
    return math.tan(x)


def absolute(x: Number) -> Number:
    """|x|; at the kink the right-derivative is returned and the point recorded."""
    if isinstance(x, Dual):
        p = primal(x.re)
        if p != 0.0:
            s = 1.0 if p > 0.0 else -1.0
        else:
            sink = _NONSMOOTH.get()
            if sink is not None:
                sink.append(p)
            s = 1.0 if primal(x.eps) >= 0.0 else -1.0
        return Dual(absolute(x.re), s * x.eps)
    return abs(x)


def power(x: Number, p: Fraction) -> Number:
    """``x ** p`` for a constant rational exponent."""
    if isinstance(x, Dual):
        if p == 0:
            return Dual(1.0, 0.0)
        return Dual(power(x.re, p), float(p) * power(x.re, p - 1) * x.eps)
    if p.denominator == 1:
        n = p.numerator
        if x == 0.0 and n < 0:
            raise DomainError("zero raised to a negative power")
        try:
            return float(x) ** n
        except OverflowError as e:
            raise DomainError(f"power overflow for base {x:.6g}") from e
    if x == 0.0:
        if p < 0:
            raise DomainError("zero raised to a negative power")
        return 0.0
    if x < 0.0:
        if p.denominator % 2 == 0:
            raise DomainError(f"even root of negative base {x:.6g}")
        mag = (-x) ** float(p)
        return -mag if p.numerator % 2 else mag
    try:
        return x ** float(p)
    except OverflowError as e:
        raise DomainError(f"power overflow for base {x:.6g}") from e


def collect_nonsmooth() -> tuple[list[float], object]:
    """Start collecting kink hits; returns the sink and a reset token."""
    sink: list[float] = []
    return sink, _NONSMOOTH.set(sink)


def stop_collecting(token: object) -> None:
    _NONSMOOTH.reset(token)  # type: ignore[arg-type]
