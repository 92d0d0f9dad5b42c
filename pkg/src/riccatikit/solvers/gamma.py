"""Upper incomplete Gamma function Γ(a, t) = ∫ₜ^∞ x^(a−1)·e^(−x) dx."""

from __future__ import annotations

import logging
import math

from riccatikit.errors import InputError
from riccatikit.solvers.quadrature import quad

logger = logging.getLogger(__name__)

TAIL_REL = 1e-14
QUAD_REL = 1e-13
_MAX_EXTENSIONS = 64


def _tail_bound(a: float, upper: float) -> float:
    """Bound on ∫_upper^∞ x^(a−1)e^(−x) dx, valid once upper > a − 1."""
    head = math.exp((a - 1.0) * math.log(upper) - upper)
    if a <= 1.0:
        return head
    return head / (1.0 - (a - 1.0) / upper)


def upper_gamma(a: float, t: float) -> float:
    """Γ(a, t) for t > 0 by quadrature, extending the upper limit until the tail is negligible.

    Integer ``a`` is cross-checked against the finite closed form.
    """
    if not t > 0.0:
        raise InputError(f"upper_gamma needs t > 0, got {t}")

    def integrand(x: float) -> float:
        return math.exp((a - 1.0) * math.log(x) - x)

    value = 0.0
    lo = t
    width = max(8.0, 2.0 * abs(a))
    for _ in range(_MAX_EXTENSIONS):
        hi = lo + width
        value += quad(integrand, lo, hi, tol=QUAD_REL, atol=0.0).value
        if hi > a - 1.0 + 1.0 and _tail_bound(a, hi) <= TAIL_REL * value:
            break
        lo = hi
        width *= 2.0

    if float(a).is_integer() and 1.0 <= a <= 170.0:
        exact = upper_gamma_integer(int(a) - 1, t)
        if exact > 0.0 and abs(value - exact) > 1e-10 * exact:
            logger.warning(
                "upper_gamma(%g, %g): quadrature %.17g disagrees with closed form %.17g",
                a, t, value, exact,
            )
    return value


def upper_gamma_integer(n: int, t: float) -> float:
    """Γ(n+1, t) = n!·e^(−t)·Σₖ₌₀ⁿ tᵏ/k!."""
    if n < 0:
        raise InputError(f"upper_gamma_integer needs n >= 0, got {n}")
    term = 1.0
    total = 1.0
    for k in range(1, n + 1):
        term *= t / k
        total += term
    return math.factorial(n) * math.exp(-t) * total
