"""Configuration loading and validation for riccatikit."""

from __future__ import annotations

import importlib.resources
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, Field


class StepControl(BaseModel):
    """Adaptive step control for the embedded Runge-Kutta integrators."""

    rtol: float = 1e-9
    atol: float = 1e-12
    h0: float = 1e-3
    hmax: float | None = None
    max_steps: int = 1_000_000
    adaptive: bool = True
    fixed_step: float | None = None


class GridConfig(BaseModel):
    """Sample grid used by constancy and residual checks."""

    points: int = 256
    tolerance: float = 1e-8
    kind: str = "chebyshev"


class OracleConfig(BaseModel):
    """Chart handling of the numerical oracle."""

    switch_threshold: float = 2.0
    record_poles: bool = True


class QuadConfig(BaseModel):
    """Adaptive Gauss-Kronrod settings."""

    tol: float = 1e-12


class CompareConfig(BaseModel):
    """Random probes for compare jobs."""

    probes: int = 3
    seed: int = 7
    probe_range: tuple[float, float] = (-1.5, 1.5)


class OutputConfig(BaseModel):
    digits: int = 17


class KitConfig(BaseModel):
    """Top-level riccatikit configuration."""

    step: StepControl = Field(default_factory=StepControl)
    grid: GridConfig = Field(default_factory=GridConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    quadrature: QuadConfig = Field(default_factory=QuadConfig)
    compare: CompareConfig = Field(default_factory=CompareConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)


def _default_config_path() -> Path:
    """Return path to the bundled default config."""
    try:
        pkg = importlib.resources.files("riccatikit")
        p = Path(str(pkg.joinpath("..", "..", "configs", "default.yaml")))
        if p.exists():
            return p
    except (ModuleNotFoundError, TypeError):
        pass
    return Path(__file__).resolve().parent.parent.parent / "configs" / "default.yaml"


def load_config(path: str | Path | None = None) -> KitConfig:
    """Load configuration from YAML, falling back to defaults.

    Args:
        path: Optional path to a YAML config file.

    Returns:
        Validated KitConfig instance.
    """
    data: dict[str, Any] = {}
    p = Path(path) if path is not None else _default_config_path()
    if p.exists():
        with open(p) as f:
            data = yaml.safe_load(f) or {}
    return KitConfig(**data)


def merge_cli_overrides(config: KitConfig, **overrides: Any) -> KitConfig:
    """Merge CLI flag overrides into an existing config.

    Only non-None overrides are applied.
    """
    updates: dict[str, Any] = {}
    step_updates = {
        k: overrides[k] for k in ("rtol", "atol") if overrides.get(k) is not None
    }
    if step_updates:
        updates["step"] = config.step.model_copy(update=step_updates)
    grid_updates: dict[str, Any] = {}
    if overrides.get("grid_points") is not None:
        grid_updates["points"] = overrides["grid_points"]
    if overrides.get("tol_const") is not None:
        grid_updates["tolerance"] = overrides["tol_const"]
    if grid_updates:
        updates["grid"] = config.grid.model_copy(update=grid_updates)
    if overrides.get("seed") is not None:
        updates["compare"] = config.compare.model_copy(update={"seed": overrides["seed"]})
    if updates:
        return config.model_copy(update=updates)
    return config
