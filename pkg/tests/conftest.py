"""Shared test fixtures for riccatikit."""

from __future__ import annotations

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from riccatikit.config import KitConfig
from riccatikit.integrability.fixtures.base import FixtureCase
from riccatikit.integrability.fixtures.catalog import hovy
from riccatikit.riccati.equation import RiccatiEq


@pytest.fixture
def tangent_eq() -> RiccatiEq:
    """dy/dt = 1 + y² on (0, 2); the solution from 0 is tan t."""
    return RiccatiEq.from_constants(1.0, 0.0, 1.0, (0.0, 2.0))


@pytest.fixture
def hovy_case() -> FixtureCase:
    return hovy()


@pytest.fixture
def config() -> KitConfig:
    """Built-in defaults, independent of configs/default.yaml."""
    return KitConfig()


@pytest.fixture
def write_spec(tmp_path: Path) -> Callable[..., Path]:
    """Write a job spec dict as JSON and return its path."""

    def _write(data: dict[str, Any], name: str = "spec.json") -> Path:
        p = tmp_path / name
        p.write_text(json.dumps(data))
        return p

    return _write
