"""Exception hierarchy for riccatikit.

Input problems derive from ``ValueError`` and map to CLI exit code 2;
numerical failures derive from ``ArithmeticError`` and map to exit code 3.
"""

from __future__ import annotations


class RiccatiKitError(Exception):
    """Base class for every error raised by the toolkit."""


# ---------------------------------------------------------------------------
# Input errors
# ---------------------------------------------------------------------------

class InputError(RiccatiKitError, ValueError):
    """The caller supplied something the toolkit cannot work with."""


class ExprSyntaxError(InputError):
    """Expression text does not conform to the grammar."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(InputError):
    """An identifier is neither ``t``, a parameter, a constant nor a function."""

    def __init__(self, name: str, offset: int | None = None) -> None:
        where = f" at offset {offset}" if offset is not None else ""
        super().__init__(f"Unknown identifier '{name}'{where}")
        self.name = name
        self.offset = offset


class SpecValidationError(InputError):
    """A job spec failed schema validation."""

    def __init__(self, errors: list[str]) -> None:
        super().__init__("Invalid job spec: " + "; ".join(errors))
        self.errors = errors


class NotASolutionError(InputError):
    """A supplied particular solution does not solve the equation."""

    def __init__(self, residual: float, tol: float) -> None:
        super().__init__(f"Not a solution: residual {residual:.3e} exceeds {tol:.1e}")
        self.residual = residual


class SignIncompatibilityError(InputError):
    """sign(b0*b2) differs from sign(c0*c2), or changes on the grid."""


class CoincidentSolutionsError(InputError):
    """Two particular solutions meet, so the cross-ratio chart breaks."""

    def __init__(self, t: float) -> None:
        super().__init__(f"Particular solutions coincide near t={t:.17g}")
        self.t = t


class GridMismatchError(InputError):
    """Traces that must share a time grid do not."""


class DeterminantError(InputError):
    """Matrix entries do not have unit determinant."""


# ---------------------------------------------------------------------------
# Numerical errors
# ---------------------------------------------------------------------------

class NumericalError(RiccatiKitError, ArithmeticError):
    """A computation failed for numerical reasons."""


class DomainError(NumericalError):
    """An expression was evaluated outside its domain."""

    def __init__(self, message: str, t: float | None = None) -> None:
        where = f" (t={t:.17g})" if t is not None else ""
        super().__init__(f"{message}{where}")
        self.t = t


class StepUnderflowError(NumericalError):
    """The adaptive step size fell below the representable minimum."""

    def __init__(self, t_last: float, h: float) -> None:
        super().__init__(f"Step size underflow (h={h:.3e}) after last good time t={t_last:.17g}")
        self.t_last = t_last
        self.h = h


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge within the subdivision limit."""

    def __init__(self, estimate: float, error: float, limit: int) -> None:
        super().__init__(
            f"Quadrature did not converge after {limit} subdivisions "
            f"(estimate {estimate:.17g}, error {error:.3e})"
        )
        self.estimate = estimate
        self.error = error


class DegenerateTransformError(NumericalError):
    """The FT2 function D reached zero, so the change of variables degenerates."""

    def __init__(self, t: float) -> None:
        super().__init__(f"D(t) crosses zero near t={t:.17g}")
        self.t = t
