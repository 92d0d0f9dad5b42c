"""Base fixture protocol and result types."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

from pydantic import BaseModel

from riccatikit.riccati.equation import RiccatiEq
from riccatikit.types import CaseKind


@dataclass
class FixtureCase:
    """A named equation with the classification it is known to have.

    Args:
        name: Fixture id.
        equation: The equation.
        expected_case: Case the cascade must report.
        expected_constant: CTU constant K or constant solution c, when one applies.
        y0: Default initial value for solve jobs.
        t_span: Default time span for solve jobs.
        y0_list: Probe initial values for compare jobs.
        extras: Closed forms and constants used by tests and reports.
    """

    name: str
    equation: RiccatiEq
    expected_case: CaseKind
    expected_constant: float | None = None
    y0: float | str = 0.0
    t_span: tuple[float, float] | None = None
    y0_list: list[float | str] = field(default_factory=list)
    extras: dict[str, Any] = field(default_factory=dict)

    def spec(self) -> dict[str, Any]:
        """A job spec dict for this fixture.

        Raises:
            InputError: A coefficient is a numeric closure without textual form.
        """
        b0, b1, b2 = self.equation.render()
        lo, hi = self.equation.domain
        span = self.t_span or (lo, hi)
        out: dict[str, Any] = {
            "name": self.name,
            "equation": {"b0": b0, "b1": b1, "b2": b2, "params": {}, "domain": [lo, hi]},
            "y0": self.y0,
            "t_span": [span[0], span[1]],
        }
        if self.y0_list:
            out["y0_list"] = list(self.y0_list)
        return out


class Fixture(ABC):
    """Abstract base class for named fixture equations."""

    @property
    @abstractmethod
    def info(self) -> FixtureInfo:
        """Return the fixture's listing info."""

    @abstractmethod
    def build(self) -> FixtureCase:
        """Construct the equation with its default parameters."""


class FixtureInfo(BaseModel):
    """Lightweight info about a registered fixture (for listing)."""

    id: str
    name: str
    case: CaseKind
    description: str = ""
