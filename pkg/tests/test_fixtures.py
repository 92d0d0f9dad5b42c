"""Tests for the fixture catalog and registry."""

from __future__ import annotations

import math

import pytest

from riccatikit.engine.schema import validate_spec
from riccatikit.errors import InputError
from riccatikit.integrability.fixtures.base import FixtureCase
from riccatikit.integrability.fixtures.catalog import (
    allen_stein,
    hovy,
    ibragimov,
    rao_ukidave,
    rescaled,
    tangent,
)
from riccatikit.integrability.fixtures.registry import get_registry, register_fixture
from riccatikit.types import CaseKind

EXPECTED_IDS = [
    "allen_stein",
    "autonomous_two_roots",
    "hong_xiang",
    "hovy",
    "ibragimov",
    "kovalevskaya",
    "rao_ukidave",
    "tangent",
]


class TestRegistry:
    """Tests for fixture discovery and lookup."""

    def test_all_registered(self) -> None:
        assert get_registry().get_all_fixture_ids() == EXPECTED_IDS

    def test_list_by_case(self) -> None:
        infos = get_registry().list_fixtures(case="LinearizableByConstant")
        assert [i.id for i in infos] == ["hovy", "ibragimov"]
        assert all(i.case == CaseKind.LINEARIZABLE_BY_CONSTANT for i in infos)

    def test_unknown_id(self) -> None:
        with pytest.raises(KeyError, match="Unknown fixture"):
            get_registry().get_fixture("nope")

    def test_list_by_case_kind(self) -> None:
        infos = get_registry().list_fixtures(CaseKind.CTU_INTEGRABLE)
        assert [i.id for i in infos] == [
            i.id for i in get_registry().list_fixtures(case="CTUIntegrable")
        ]
        assert infos and all(i.case is CaseKind.CTU_INTEGRABLE for i in infos)

    def test_unknown_case_name(self) -> None:
        with pytest.raises(InputError, match="Unknown case"):
            get_registry().list_fixtures(case="Quadratic")

    def test_duplicate_id_rejected(self) -> None:
        existing = type(get_registry().get_fixture("tangent"))
        clone = type("TangentAgain", (existing,), {})
        with pytest.raises(InputError, match="already registered"):
            register_fixture(clone)
        assert type(get_registry().get_fixture("tangent")) is existing

    def test_info_matches_build(self) -> None:
        reg = get_registry()
        for fid in reg.get_all_fixture_ids():
            fixture = reg.get_fixture(fid)
            case = fixture.build()
            assert case.name == fid
            assert case.expected_case == fixture.info.case


class TestCatalog:
    """Tests for the fixture constructors."""

    def test_hovy_constants(self, hovy_case: FixtureCase) -> None:
        assert hovy_case.expected_constant == 1.0
        assert hovy_case.t_span == (0.5, 5.0)
        assert hovy_case.y0 == 2.0
        assert hovy_case.equation.rhs(2.0, 1.0) == pytest.approx(0.0)

    def test_ibragimov_constant_root(self) -> None:
        case = ibragimov()
        assert case.extras["K"] == -3.0
        for t in (0.0, 1.0, 4.0):
            assert case.equation.rhs(t, -1.0 / 3.0) == pytest.approx(0.0, abs=1e-14)

    def test_ibragimov_rejects_zero_k(self) -> None:
        with pytest.raises(InputError):
            ibragimov(k=0.0)

    def test_rao_ukidave_needs_positive_c(self) -> None:
        with pytest.raises(InputError, match="positive"):
            rao_ukidave(c=-1.0)

    def test_rao_ukidave_general_coefficients(self) -> None:
        case = rao_ukidave(b0="1 + t", b1="cos(t)")
        assert case.expected_constant == pytest.approx(-2.0)
        assert case.equation.b2.eval(0.5) > 0.0

    def test_allen_stein_constant(self) -> None:
        assert allen_stein(C=-0.25).expected_constant == -0.25

    def test_tangent_pole(self) -> None:
        case = tangent()
        assert case.extras["pole"] == pytest.approx(math.pi / 2.0)
        assert case.y0_list == [0.0, 1.0, "inf"]

    def test_rescaled(self) -> None:
        eq = rescaled(tangent(), "1 + t")
        assert eq.coefficients_at(1.0) == pytest.approx((2.0, 0.0, 2.0))


class TestSpecs:
    """Fixtures export as valid job specs."""

    def test_hovy_spec(self, hovy_case: FixtureCase) -> None:
        spec = hovy_case.spec()
        assert spec["name"] == "hovy"
        assert spec["t_span"] == [0.5, 5.0]
        assert spec["y0_list"] == [0.0, 0.5, 2.0]
        parsed = validate_spec(spec)
        assert parsed.equation.domain == (0.5, 5.0)

    def test_tangent_spec_keeps_infinity(self) -> None:
        spec = tangent().spec()
        assert spec["y0_list"][-1] == "inf"
        validate_spec(spec)

    def test_closure_fixture_has_no_text(self) -> None:
        case = rao_ukidave(b0="1 + t", b1="cos(t)")
        with pytest.raises(InputError):
            case.spec()
