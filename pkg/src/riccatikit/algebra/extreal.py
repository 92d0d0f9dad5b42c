"""Points of the compactified real line R ∪ {∞}."""

from __future__ import annotations

import math
from dataclasses import dataclass

from riccatikit.errors import InputError


@dataclass(frozen=True, slots=True)
class ExtReal:
    """A finite real or the single unsigned point at infinity.

    Infinity is stored as ``math.inf``; ``-inf`` is normalized to it.
    """

    value: float

    def __post_init__(self) -> None:
        v = float(self.value)
        if math.isnan(v):
            raise InputError("NaN is not a point of the extended line")
        object.__setattr__(self, "value", math.inf if math.isinf(v) else v)

    @classmethod
    def finite(cls, y: float) -> ExtReal:
        if not math.isfinite(y):
            raise InputError(f"Finite point expected, got {y}")
        return cls(y)

    @classmethod
    def infinity(cls) -> ExtReal:
        return cls(math.inf)

    @property
    def is_infinite(self) -> bool:
        return self.value == math.inf

    def angle(self) -> float:
        """Chart angle 2·atan(y); infinity maps to π."""
        return math.pi if self.is_infinite else 2.0 * math.atan(self.value)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return "inf" if self.is_infinite else f"{self.value:.17g}"


INFINITY = ExtReal.infinity()


def chordal_distance(a: ExtReal, b: ExtReal) -> float:
    """Distance on the circle through the 2·atan chart (wraps at 2π)."""
    d = abs(a.angle() - b.angle())
    return min(d, 2.0 * math.pi - d)


def parse_ext(value: float | str | ExtReal) -> ExtReal:
    """Accept a float, the strings ``"inf"``/``"infinity"`` or an ExtReal."""
    if isinstance(value, ExtReal):
        return value
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "-inf", "infinity"):
            return INFINITY
        try:
            return ExtReal.finite(float(text))
        except ValueError as e:
            raise InputError(f"Not a point of the extended line: {value!r}") from e
    return ExtReal(float(value))
