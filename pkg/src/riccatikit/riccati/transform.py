"""How a curve Ā(t) in SL(2,R) acts on Riccati equations and on their solutions.

Under y' = (α·y + β)/(γ·y + δ) the equation with coefficients (b0, b1, b2)
becomes the Riccati equation with

    b2' = δ²b2 − δγ·b1 + γ²b0 + γδ̇ − δγ̇
    b1' = −2βδ·b2 + (αδ + βγ)·b1 − 2αγ·b0 + δα̇ − αδ̇ + βγ̇ − γβ̇
    b0' = β²b2 − αβ·b1 + α²b0 + αβ̇ − βα̇

The same arithmetic runs on expressions (symbolic path) and on floats
(grid path), so the two never disagree on signs.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from riccatikit.algebra.curves import ConstantCurve, SL2Curve, intersect
from riccatikit.algebra.extreal import ExtReal
from riccatikit.algebra.sl2 import mobius
from riccatikit.expr import deriv_info
from riccatikit.expr.grid import Grid
from riccatikit.expr.nodes import Diff, Expr, Num
from riccatikit.riccati.equation import RiccatiEq
from riccatikit.solvers.trace import SolutionTrace

Factor = Expr | float
Term = tuple[float, Sequence[Factor]]


def _combine(terms: Sequence[Term]) -> Factor:
    """Σ coef·Π factors, folding numeric factors and dropping zero terms."""
    constant = 0.0
    parts: list[tuple[float, Expr]] = []
    for coef, factors in terms:
        k = coef
        exprs: list[Expr] = []
        for f in factors:
            if isinstance(f, Num):
                f = f.value
            if isinstance(f, Expr):
                exprs.append(f)
            else:
                k *= f
        if k == 0.0:
            continue
        if not exprs:
            constant += k
            continue
        prod = exprs[0]
        for e in exprs[1:]:
            prod = prod * e
        parts.append((k, prod))

    if not parts:
        return constant
    acc = _signed(*parts[0])
    for k, prod in parts[1:]:
        acc = acc - _scaled(-k, prod) if k < 0.0 else acc + _scaled(k, prod)
    if constant != 0.0:
        acc = acc - Num(-constant) if constant < 0.0 else acc + Num(constant)
    return acc


def _scaled(k: float, e: Expr) -> Expr:
    return e if k == 1.0 else k * e


def _signed(k: float, e: Expr) -> Expr:
    return -_scaled(-k, e) if k < 0.0 else _scaled(k, e)


def _law(
    b: tuple[Factor, Factor, Factor],
    m: tuple[Factor, Factor, Factor, Factor],
    md: tuple[Factor, Factor, Factor, Factor],
) -> tuple[Factor, Factor, Factor]:
    b0, b1, b2 = b
    a, bt, g, d = m
    ad, bd, gd, dd = md
    n2 = _combine([
        (1.0, (d, d, b2)), (-1.0, (d, g, b1)), (1.0, (g, g, b0)),
        (1.0, (g, dd)), (-1.0, (d, gd)),
    ])
    n1 = _combine([
        (-2.0, (bt, d, b2)), (1.0, (a, d, b1)), (1.0, (bt, g, b1)), (-2.0, (a, g, b0)),
        (1.0, (d, ad)), (-1.0, (a, dd)), (1.0, (bt, gd)), (-1.0, (g, bd)),
    ])
    n0 = _combine([
        (1.0, (bt, bt, b2)), (-1.0, (a, bt, b1)), (1.0, (a, a, b0)),
        (1.0, (a, bd)), (-1.0, (bt, ad)),
    ])
    return n0, n1, n2


def _as_expr(v: Factor) -> Expr:
    return v if isinstance(v, Expr) else Num(float(v))


def transform(eq: RiccatiEq, curve: SL2Curve) -> RiccatiEq:
    """The equation satisfied by y' = Ā(t)·y whenever y solves ``eq``.

    Coefficients stay expressions, so they can be differentiated again.
    Entry derivatives are taken with ``diff``; a non-differentiable entry
    surfaces as ``DomainError`` when the new coefficients are evaluated.

    Args:
        eq: Source equation.
        curve: Constant, analytic or tabulated curve.

    Returns:
        The transformed equation on the intersection of both domains.
    """
    domain = intersect(eq.domain, curve.domain)
    if isinstance(curve, ConstantCurve):
        m: tuple[Factor, ...] = curve.matrix.entries()
        md: tuple[Factor, ...] = (0.0, 0.0, 0.0, 0.0)
    else:
        m = curve.entries()
        md = tuple(0.0 if isinstance(e, Num) else Diff(e) for e in m)
    n0, n1, n2 = _law(eq.coefficients, m, md)  # type: ignore[arg-type]
    return RiccatiEq(_as_expr(n0), _as_expr(n1), _as_expr(n2), domain, check=False)


def transform_on_grid(eq: RiccatiEq, curve: SL2Curve, grid: Grid) -> np.ndarray:
    """Evaluate the transformed coefficients directly on ``grid`` (3×n array)."""
    out = np.empty((3, len(grid)), dtype=np.float64)
    entries = curve.entries()
    for j, t in enumerate(grid.points):
        t = float(t)
        infos = [deriv_info(e, t) for e in entries]
        m = tuple(i.value for i in infos)
        md = tuple(i.derivative for i in infos)
        out[:, j] = _law(eq.coefficients_at(t), m, md)  # type: ignore[arg-type]
    return out


def push_solution(curve: SL2Curve, trace: SolutionTrace) -> SolutionTrace:
    """y'ᵢ = Ā(tᵢ)·yᵢ pointwise on the extended line."""

    def push(t: float, y: ExtReal) -> ExtReal:
        return mobius(curve.at(t), y)

    out = trace.map(push)
    out.pole_times = [
        float(t) for t, v in zip(out.times, out.values, strict=True) if v.is_infinite
    ]
    return out
