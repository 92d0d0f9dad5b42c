"""Shared type definitions for riccatikit."""

from __future__ import annotations

import sys
from typing import Any, Literal

if sys.version_info >= (3, 11):
    from enum import StrEnum
else:  # pragma: no cover - Python 3.10 compatibility
    from enum import Enum

    class StrEnum(str, Enum):
        """Backport of :class:`enum.StrEnum` for Python 3.10."""

        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)

from pydantic import BaseModel, Field, field_validator, model_validator

# ---------------------------------------------------------------------------
# Enumerations
# ---------------------------------------------------------------------------

class Chart(StrEnum):
    """Which coordinate the oracle was integrating at a sample."""

    DIRECT = "direct"
    INVERTED = "inverted"


class CaseKind(StrEnum):
    """Outcome of the classification cascade."""

    LINEAR_ALREADY = "LinearAlready"
    INVERSE_LINEAR = "InverseLinear"
    AUTONOMOUS = "Autonomous"
    SEPARABLE = "Separable"
    CTU_INTEGRABLE = "CTUIntegrable"
    LINEARIZABLE_BY_CONSTANT = "LinearizableByConstant"
    FT2_SPECIAL_M = "FT2SpecialM"
    KNOWN_PARTICULAR_SOLUTION = "KnownParticularSolution"
    UNCLASSIFIED = "Unclassified"


class StepTag(StrEnum):
    """Variable changes that are not plain SL2 curves."""

    SHIFT_BY_SOLUTION = "shift_by_solution"
    INVERT = "invert"
    CROSS_RATIO = "cross_ratio"
    TIME_REPARAM = "time_reparam"
    SCALE = "scale"
    CONSTANT_CURVE = "constant_curve"


class Method(StrEnum):
    """How a solve job produced its trace."""

    QUADRATURES = "quadratures"
    AUTONOMOUS = "autonomous closed form"
    PARTICULAR = "particular-solution reduction"
    CTU = "CTU transformation"
    FT2_SPECIAL_M = "reduction (M=b1/b2)"
    ORACLE = "oracle"


# ---------------------------------------------------------------------------
# Job specs (CLI input)
# ---------------------------------------------------------------------------

class EquationSpec(BaseModel):
    """Coefficient strings of dy/dt = b0 + b1*y + b2*y^2."""

    b0: str
    b1: str
    b2: str
    params: dict[str, float] = Field(default_factory=dict)
    domain: tuple[float, float]

    @field_validator("domain")
    @classmethod
    def _non_empty(cls, v: tuple[float, float]) -> tuple[float, float]:
        if not v[0] < v[1]:
            raise ValueError(f"domain must be non-empty, got {list(v)}")
        return v


class CurveSpec(BaseModel):
    """A constant matrix or four entry expressions."""

    kind: Literal["constant", "analytic"]
    matrix: list[list[float]] | None = None
    entries: list[str] | None = None
    params: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _payload(self) -> CurveSpec:
        if self.kind == "constant" and (self.matrix is None or len(self.matrix) != 2):
            raise ValueError("constant curve needs a 2x2 'matrix'")
        if self.kind == "analytic" and (self.entries is None or len(self.entries) != 4):
            raise ValueError("analytic curve needs four 'entries'")
        return self


class TargetSpec(BaseModel):
    """Target of a connect job: another equation, or D*(c0 + c1*y + c2*y^2)."""

    equation: EquationSpec | None = None
    D: str | None = None
    c: tuple[float, float, float] | None = None
    params: dict[str, float] = Field(default_factory=dict)


class JobSpec(BaseModel):
    """A parsed job file."""

    equation: EquationSpec
    y0: float | str | None = None
    y0_list: list[float | str] = Field(default_factory=list)
    t_span: tuple[float, float] | None = None
    t_eval: int = 201
    curve: CurveSpec | None = None
    target: TargetSpec | None = None
    x0: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 1.0)
    particular: str | None = None
    seed: int | None = None
    name: str = ""


# ---------------------------------------------------------------------------
# Reports (CLI output)
# ---------------------------------------------------------------------------

class Evidence(BaseModel):
    """Fitted constants and grid residuals backing a classification."""

    constant: float | None = None
    residual: float = 0.0
    details: dict[str, Any] = Field(default_factory=dict)


class ClassifyReport(BaseModel):
    case: CaseKind
    evidence: Evidence
    suggested_plan: list[str] = Field(default_factory=list)


class SolveSummary(BaseModel):
    method: Method
    case: CaseKind
    points: int
    max_defect: float | None = None
    oracle_error: float | None = None
    pole_times: list[float] = Field(default_factory=list)
    chart_switches: int = 0
    trace_path: str | None = None


class ProbeResult(BaseModel):
    y0: str
    sup_error: float
    pole_passages: int = 0
    failed: str | None = None


class CompareReport(BaseModel):
    name: str = ""
    method: Method
    case: CaseKind
    seed: int
    probes: list[ProbeResult] = Field(default_factory=list)
    stats: dict[str, float] = Field(default_factory=dict)


class ConnectReport(BaseModel):
    knots: int
    det_initial: float
    max_det_drift: float
    max_offdiagonal: float
    mapping_residual: float | None = None
    steps: int = 0


class TransformReport(BaseModel):
    equation: EquationSpec
    curve: Literal["constant", "analytic"]
    grid_residual: float
