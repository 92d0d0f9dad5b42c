"""Tests for configuration loading and CLI overrides."""

from __future__ import annotations

from pathlib import Path

import pytest
from pydantic import ValidationError

from riccatikit.config import KitConfig, load_config, merge_cli_overrides


class TestLoadConfig:
    """Tests for YAML loading."""

    def test_defaults(self, config: KitConfig) -> None:
        assert config.step.rtol == 1e-9
        assert config.step.atol == 1e-12
        assert config.grid.points == 256
        assert config.grid.kind == "chebyshev"
        assert config.oracle.switch_threshold == 2.0
        assert config.output.digits == 17

    def test_bundled_file_matches_defaults(self) -> None:
        assert load_config() == KitConfig()

    def test_missing_file_gives_defaults(self, tmp_path: Path) -> None:
        assert load_config(tmp_path / "nope.yaml") == KitConfig()

    def test_partial_file(self, tmp_path: Path) -> None:
        p = tmp_path / "cfg.yaml"
        p.write_text("step:\n  rtol: 1.0e-6\ncompare:\n  seed: 11\n")
        cfg = load_config(p)
        assert cfg.step.rtol == 1e-6
        assert cfg.step.atol == 1e-12
        assert cfg.compare.seed == 11

    def test_empty_file(self, tmp_path: Path) -> None:
        p = tmp_path / "empty.yaml"
        p.write_text("")
        assert load_config(p) == KitConfig()

    def test_bad_value(self, tmp_path: Path) -> None:
        p = tmp_path / "bad.yaml"
        p.write_text("grid:\n  points: many\n")
        with pytest.raises(ValidationError):
            load_config(p)


class TestOverrides:
    """Tests for merge_cli_overrides."""

    def test_none_changes_nothing(self, config: KitConfig) -> None:
        assert merge_cli_overrides(config, rtol=None, seed=None) is config

    def test_step_and_grid(self, config: KitConfig) -> None:
        cfg = merge_cli_overrides(config, rtol=1e-7, grid_points=64, tol_const=1e-6)
        assert cfg.step.rtol == 1e-7
        assert cfg.step.atol == config.step.atol
        assert cfg.grid.points == 64
        assert cfg.grid.tolerance == 1e-6
        # The input config is untouched.
        assert config.grid.points == 256

    def test_seed(self, config: KitConfig) -> None:
        assert merge_cli_overrides(config, seed=3).compare.seed == 3
