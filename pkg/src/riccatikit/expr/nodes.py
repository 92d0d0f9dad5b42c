"""Expression tree nodes.

Nodes are immutable and compare structurally (closures compare by identity).
Evaluation walks the tree with either floats or dual numbers, so the same
arithmetic path produces values and derivatives.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import ClassVar

from riccatikit.errors import DomainError, InputError
from riccatikit.expr import dual
from riccatikit.expr.dual import Dual, Number

# Render precedence levels.
_SUM, _PRODUCT, _UNARY, _POWER, _ATOM = 1, 2, 3, 4, 5

FUNCTIONS: dict[str, Callable[[Number], Number]] = {
    "exp": dual.exp,
    "ln": dual.ln,
    "sqrt": dual.sqrt,
    "sin": dual.sin,
    "cos": dual.cos,
    "tan": dual.tan,
    "abs": dual.absolute,
}


def _lift(value: Expr | float | int | Fraction) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, Fraction)):
        return Num(float(value))
    raise TypeError(f"Cannot use {type(value).__name__} in an expression")


class Expr:
    """Base class of all expression nodes."""

    precedence: ClassVar[int] = _ATOM

    def _ev(self, x: Number) -> Number:
        raise NotImplementedError

    def children(self) -> tuple[Expr, ...]:
        return ()

    def _render(self) -> str:
        raise NotImplementedError

    # -- evaluation ---------------------------------------------------------

    def eval(self, t: float) -> float:
        """Evaluate at ``t``; raises ``DomainError`` instead of returning inf/NaN."""
        try:
            value = self._ev(float(t))
        except DomainError as e:
            if e.t is None:
                raise DomainError(str(e), t=t) from e
            raise
        value = float(value)
        if not math.isfinite(value):
            raise DomainError("non-finite value", t=t)
        return value

    def eval_dual(self, x: Dual) -> Dual:
        """Evaluate on a dual argument (used for derivatives)."""
        out = self._ev(x)
        if not isinstance(out, Dual):
            out = Dual(out, 0.0)
        return out

    def walk(self) -> Iterator[Expr]:
        yield self
        for child in self.children():
            yield from child.walk()

    @property
    def params(self) -> dict[str, float]:
        """Named parameters referenced by the tree."""
        return {n.name: n.value for n in self.walk() if isinstance(n, Param)}

    def render(self) -> str:
        return self._render()

    def __str__(self) -> str:
        try:
            return self.render()
        except InputError:
            return repr(self)

    # -- construction helpers ----------------------------------------------

    def __add__(self, other: object) -> Expr:
        return BinOp("+", self, _lift(other))  # type: ignore[arg-type]

    def __radd__(self, other: object) -> Expr:
        return BinOp("+", _lift(other), self)  # type: ignore[arg-type]

    def __sub__(self, other: object) -> Expr:
        return BinOp("-", self, _lift(other))  # type: ignore[arg-type]

    def __rsub__(self, other: object) -> Expr:
        return BinOp("-", _lift(other), self)  # type: ignore[arg-type]

    def __mul__(self, other: object) -> Expr:
        return BinOp("*", self, _lift(other))  # type: ignore[arg-type]

    def __rmul__(self, other: object) -> Expr:
        return BinOp("*", _lift(other), self)  # type: ignore[arg-type]

    def __truediv__(self, other: object) -> Expr:
        return BinOp("/", self, _lift(other))  # type: ignore[arg-type]

    def __rtruediv__(self, other: object) -> Expr:
        return BinOp("/", _lift(other), self)  # type: ignore[arg-type]

    def __neg__(self) -> Expr:
        return Neg(self)

    def __pow__(self, exponent: int | float | Fraction) -> Expr:
        if isinstance(exponent, Expr):
            raise InputError("exponent must be a constant")
        return Pow(self, Fraction(exponent).limit_denominator(10**12))


def _wrap(node: Expr, min_level: int) -> str:
    text = node._render()
    return f"({text})" if node.precedence < min_level else text


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise InputError(f"Non-finite literal {self.value}")

    @property
    def precedence(self) -> int:  # type: ignore[override]
        return _ATOM if self.value >= 0 else _UNARY

    def _ev(self, x: Number) -> Number:
        return self.value

    def _render(self) -> str:
        if self.value >= 0:
            return repr(self.value)
        return f"-{-self.value!r}"


@dataclass(frozen=True, eq=True)
class Var(Expr):
    """The independent variable ``t``."""

    def _ev(self, x: Number) -> Number:
        return x

    def _render(self) -> str:
        return "t"


@dataclass(frozen=True, eq=True)
class Param(Expr):
    name: str
    value: float

    def _ev(self, x: Number) -> Number:
        return self.value

    def _render(self) -> str:
        return self.name


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr
    precedence: ClassVar[int] = _UNARY

    def _ev(self, x: Number) -> Number:
        return -self.arg._ev(x)

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)

    def _render(self) -> str:
        return "-" + _wrap(self.arg, _UNARY)


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def precedence(self) -> int:  # type: ignore[override]
        return _SUM if self.op in "+-" else _PRODUCT

    def _ev(self, x: Number) -> Number:
        a = self.left._ev(x)
        b = self.right._ev(x)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        return dual.div(a, b)

    def children(self) -> tuple[Expr, ...]:
        return (self.left, self.right)

    def _render(self) -> str:
        if self.op in "+-":
            return f"{_wrap(self.left, _SUM)} {self.op} {_wrap(self.right, _PRODUCT)}"
        return f"{_wrap(self.left, _PRODUCT)}{self.op}{_wrap(self.right, _UNARY)}"


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction
    precedence: ClassVar[int] = _POWER

    def _ev(self, x: Number) -> Number:
        return dual.power(self.base._ev(x), self.exponent)

    def children(self) -> tuple[Expr, ...]:
        return (self.base,)

    def _render(self) -> str:
        p = self.exponent
        if p.denominator == 1:
            exp_text = str(p.numerator)
        elif _terminates(p):
            exp_text = repr(float(p))
        else:
            exp_text = f"({p.numerator}/{p.denominator})"
        return f"{_wrap(self.base, _ATOM)}^{exp_text}"


def _terminates(p: Fraction) -> bool:
    d = p.denominator
    for prime in (2, 5):
        while d % prime == 0:
            d //= prime
    return d == 1 and Fraction(repr(float(p))) == p


@dataclass(frozen=True, eq=True)
class Call(Expr):
    fn: str
    arg: Expr

    def _ev(self, x: Number) -> Number:
        return FUNCTIONS[self.fn](self.arg._ev(x))

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)

    def _render(self) -> str:
        return f"{self.fn}({self.arg._render()})"


@dataclass(frozen=True, eq=True)
class Diff(Expr):
    """Derivative of ``arg`` with respect to t, evaluated with one more dual level."""

    arg: Expr

    def _ev(self, x: Number) -> Number:
        out = self.arg._ev(Dual(x, 1.0))
        return out.eps if isinstance(out, Dual) else 0.0

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)

    def _render(self) -> str:
        return f"diff({self.arg._render()})"


@dataclass(frozen=True, eq=False)
class Closure(Expr):
    """Opaque numeric function of t.

    ``fn`` must accept floats; when ``derivative`` is None it must also accept
    dual numbers. When ``derivative`` is given, dual arguments are handled by
    the chain rule with that expression.
    """

    fn: Callable[[Number], Number]
    derivative: Expr | None = None
    label: str = field(default="closure")

    def _ev(self, x: Number) -> Number:
        if isinstance(x, Dual) and self.derivative is not None:
            return Dual(self._ev(x.re), self.derivative._ev(x.re) * x.eps)
        return self.fn(x)

    def children(self) -> tuple[Expr, ...]:
        return (self.derivative,) if self.derivative is not None else ()

    def _render(self) -> str:
        raise InputError(f"Numeric closure '{self.label}' has no textual form")
