"""Recursive-descent parser for scalar expressions in t.

Grammar::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | power
    power := atom ("^" exponent)?
    exponent := "-"? number | "(" "-"? number ("/" number)? ")"
    atom  := number | ident | ident "(" expr ")" | "(" expr ")"

Exponents are constants, so ``f(t)^g(t)`` is rejected here rather than at
evaluation time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from riccatikit.errors import ExprSyntaxError, InputError, UnknownIdentifierError
from riccatikit.expr.nodes import FUNCTIONS, BinOp, Call, Diff, Expr, Neg, Num, Param, Pow, Var

CONSTANTS: dict[str, float] = {"pi": math.pi, "e": math.e}

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[a-zA-Z_][a-zA-Z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.lastgroup is None:
            bad = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ExprSyntaxError(f"Unexpected character {src[bad]!r}", _byte_offset(src, bad))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), _byte_offset(src, start)))
        pos = m.end()
    tokens.append(Token("end", "", len(src.encode("utf-8"))))
    return tokens


def _byte_offset(src: str, index: int) -> int:
    return len(src[:index].encode("utf-8"))


class _Parser:
    def __init__(self, src: str, params: dict[str, float]) -> None:
        self._tokens = tokenize(src)
        self._pos = 0
        self._params = params

    @property
    def _tok(self) -> Token:
        return self._tokens[self._pos]

    def _advance(self) -> Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _accept(self, text: str) -> bool:
        if self._tok.kind == "op" and self._tok.text == text:
            self._pos += 1
            return True
        return False

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            raise ExprSyntaxError(f"Expected {text!r}", self._tok.offset)

    def parse(self) -> Expr:
        if self._tok.kind == "end":
            raise ExprSyntaxError("Empty expression", self._tok.offset)
        node = self._expr()
        if self._tok.kind != "end":
            raise ExprSyntaxError(f"Unexpected {self._tok.text!r}", self._tok.offset)
        return node

    def _expr(self) -> Expr:
        node = self._term()
        while self._tok.kind == "op" and self._tok.text in "+-":
            op = self._advance().text
            node = BinOp(op, node, self._term())
        return node

    def _term(self) -> Expr:
        node = self._unary()
        while self._tok.kind == "op" and self._tok.text in "*/":
            op = self._advance().text
            node = BinOp(op, node, self._unary())
        return node

    def _unary(self) -> Expr:
        if self._accept("-"):
            return Neg(self._unary())
        return self._power()

    def _power(self) -> Expr:
        base = self._atom()
        if self._accept("^"):
            return Pow(base, self._exponent())
        return base

    def _exponent(self) -> Fraction:
        if self._accept("("):
            value = self._signed_number()
            if self._accept("/"):
                denom = self._number()
                if denom == 0:
                    raise ExprSyntaxError("Zero denominator in exponent", self._tok.offset)
                value = value / denom
            self._expect(")")
            return value
        return self._signed_number()

    def _signed_number(self) -> Fraction:
        negative = self._accept("-")
        value = self._number()
        return -value if negative else value

    def _number(self) -> Fraction:
        tok = self._tok
        if tok.kind != "number":
            raise ExprSyntaxError("Exponent must be a constant number", tok.offset)
        self._advance()
        return Fraction(tok.text)

    def _atom(self) -> Expr:
        tok = self._tok
        if tok.kind == "number":
            self._advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self._advance()
            if self._accept("("):
                if tok.text != "diff" and tok.text not in FUNCTIONS:
                    raise UnknownIdentifierError(tok.text, tok.offset)
                arg = self._expr()
                self._expect(")")
                return Diff(arg) if tok.text == "diff" else Call(tok.text, arg)
            return self._name(tok)
        if self._accept("("):
            node = self._expr()
            self._expect(")")
            return node
        if tok.kind == "end":
            raise ExprSyntaxError("Unexpected end of input", tok.offset)
        raise ExprSyntaxError(f"Unexpected {tok.text!r}", tok.offset)

    def _name(self, tok: Token) -> Expr:
        name = tok.text
        if name == "t":
            return Var()
        if name in self._params:
            return Param(name, float(self._params[name]))
        if name in CONSTANTS:
            return Param(name, CONSTANTS[name])
        raise UnknownIdentifierError(name, tok.offset)


def parse(src: str, params: dict[str, float] | None = None) -> Expr:
    """Parse ``src`` into an expression tree.

    Args:
        src: Expression text in the grammar above.
        params: Values for every free name other than ``t``.

    Returns:
        The parsed expression.

    Raises:
        ExprSyntaxError: With the byte offset of the offending token.
        UnknownIdentifierError: Naming the unresolved identifier.
    """
    params = dict(params or {})
    if "t" in params:
        raise InputError("'t' is the independent variable and cannot be a parameter")
    return _Parser(src, params).parse()
