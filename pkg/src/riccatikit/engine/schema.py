"""Job spec loading: JSON schema check, pydantic parsing, expression parsing."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema
from pydantic import ValidationError

from riccatikit.algebra.curves import AnalyticCurve, ConstantCurve, Domain, SL2Curve
from riccatikit.algebra.sl2 import SL2
from riccatikit.errors import DomainError, InputError, SpecValidationError
from riccatikit.expr import parse
from riccatikit.expr.nodes import Expr
from riccatikit.riccati.equation import RiccatiEq, TargetForm
from riccatikit.types import CurveSpec, EquationSpec, JobSpec, TargetSpec

_NUMBER_OR_INF = {
    "oneOf": [
        {"type": "number"},
        {"type": "string", "enum": ["inf", "+inf", "-inf", "infinity"]},
    ]
}

_EQUATION_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "b0": {"type": "string"},
        "b1": {"type": "string"},
        "b2": {"type": "string"},
        "params": {"type": "object", "additionalProperties": {"type": "number"}},
        "domain": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
    },
    "required": ["b0", "b1", "b2", "domain"],
}

JOB_SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "equation": _EQUATION_SCHEMA,
        "y0": _NUMBER_OR_INF,
        "y0_list": {"type": "array", "items": _NUMBER_OR_INF},
        "t_span": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
        "t_eval": {"type": "integer", "minimum": 2},
        "curve": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["constant", "analytic"]},
                "matrix": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "number"},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                    "minItems": 2,
                    "maxItems": 2,
                },
                "entries": {
                    "type": "array",
                    "items": {"type": "string"},
                    "minItems": 4,
                    "maxItems": 4,
                },
                "params": {"type": "object", "additionalProperties": {"type": "number"}},
            },
            "required": ["kind"],
        },
        "target": {
            "type": "object",
            "properties": {
                "equation": _EQUATION_SCHEMA,
                "D": {"type": "string"},
                "c": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 3,
                    "maxItems": 3,
                },
                "params": {"type": "object", "additionalProperties": {"type": "number"}},
            },
        },
        "x0": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
        "particular": {"type": "string"},
        "seed": {"type": "integer"},
    },
    "required": ["equation"],
}


def schema_errors(data: Any) -> list[str]:
    """All schema violations as ``"{json_path}: {message}"`` strings."""
    validator = jsonschema.Draft7Validator(JOB_SCHEMA)
    return [f"{error.json_path}: {error.message}" for error in validator.iter_errors(data)]


def validate_spec(data: Any) -> JobSpec:
    """Validate raw JSON data and parse every expression it contains.

    Raises:
        SpecValidationError: Schema or model validation failed.
        ExprSyntaxError: An expression string does not parse.
        UnknownIdentifierError: An expression uses an unknown name.
    """
    errors = schema_errors(data)
    if errors:
        raise SpecValidationError(errors)
    try:
        spec = JobSpec.model_validate(data)
    except ValidationError as e:
        raise SpecValidationError(
            [f"$.{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]
        ) from e
    # Parse up front so bad expressions fail before any computation.
    try:
        build_equation(spec.equation)
    except DomainError as e:
        raise InputError(f"Coefficients are not defined on the domain: {e}") from e
    if spec.particular is not None:
        parse(spec.particular, spec.equation.params)
    if spec.curve is not None and spec.curve.kind == "analytic":
        _curve_entries(spec.curve)
    if spec.target is not None and spec.target.D is not None:
        parse(spec.target.D, spec.target.params or spec.equation.params)
    return spec


def load_spec(path: str | Path) -> JobSpec:
    """Read and validate a JSON job file."""
    p = Path(path)
    try:
        with open(p) as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise InputError(f"No such spec file: {p}") from e
    except json.JSONDecodeError as e:
        raise SpecValidationError([f"Invalid JSON: {e}"]) from e
    return validate_spec(data)


def build_equation(spec: EquationSpec) -> RiccatiEq:
    return RiccatiEq.parse(spec.b0, spec.b1, spec.b2, spec.params, spec.domain)


def _curve_entries(spec: CurveSpec) -> tuple[Expr, ...]:
    return tuple(parse(e, spec.params) for e in spec.entries or [])


def build_curve(spec: CurveSpec, domain: Domain) -> SL2Curve:
    """A constant or analytic curve; the determinant is checked either way.

    Raises:
        DeterminantError: The matrix, or the entries on the domain grid, are not unimodular.
    """
    if spec.kind == "constant":
        return ConstantCurve(SL2.from_matrix(spec.matrix), domain)
    a, b, c, d = _curve_entries(spec)
    return AnalyticCurve(a, b, c, d, domain)


def build_target(spec: TargetSpec, equation: EquationSpec) -> RiccatiEq:
    """The target equation of a connect job."""
    if spec.equation is not None:
        return build_equation(spec.equation)
    if spec.D is None or spec.c is None:
        raise InputError("target needs either 'equation' or both 'D' and 'c'")
    D = parse(spec.D, spec.params or equation.params)
    c0, c1, c2 = spec.c
    return TargetForm(D, c0, c1, c2).as_equation(equation.domain)
