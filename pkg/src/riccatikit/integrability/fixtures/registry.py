"""Registry of the named fixture equations, keyed by id and grouped by expected case."""

from __future__ import annotations

from typing import TYPE_CHECKING

from riccatikit.errors import InputError
from riccatikit.types import CaseKind

if TYPE_CHECKING:
    from riccatikit.integrability.fixtures.base import Fixture, FixtureInfo

_FIXTURE_CLASSES: dict[str, type[Fixture]] = {}


def register_fixture(cls: type[Fixture]) -> type[Fixture]:
    """Class decorator adding a fixture under the id from its ``info``.

    Raises:
        InputError: Another fixture class already uses the id.
    """
    fid = cls().info.id
    known = _FIXTURE_CLASSES.get(fid)
    if known is not None and known is not cls:
        raise InputError(f"Fixture id {fid!r} is already registered by {known.__name__}")
    _FIXTURE_CLASSES[fid] = cls
    return cls


def _ensure_loaded() -> None:
    if _FIXTURE_CLASSES:
        return
    import riccatikit.integrability.fixtures.catalog  # noqa: F401


def _as_case(case: CaseKind | str) -> CaseKind:
    if isinstance(case, CaseKind):
        return case
    try:
        return CaseKind(case)
    except ValueError:
        names = ", ".join(c.value for c in CaseKind)
        raise InputError(f"Unknown case {case!r}; expected one of {names}") from None


class FixtureRegistry:
    """Lookup of registered fixtures."""

    def list_fixtures(self, case: CaseKind | str | None = None) -> list[FixtureInfo]:
        """Fixture infos sorted by case and id, optionally only those expecting ``case``.

        Raises:
            InputError: ``case`` is a string naming no case.
        """
        _ensure_loaded()
        infos = [cls().info for cls in _FIXTURE_CLASSES.values()]
        if case is not None:
            wanted = _as_case(case)
            infos = [i for i in infos if i.case is wanted]
        return sorted(infos, key=lambda i: (i.case.value, i.id))

    def get_fixture(self, fixture_id: str) -> Fixture:
        """Raises KeyError for an unknown id."""
        _ensure_loaded()
        cls = _FIXTURE_CLASSES.get(fixture_id)
        if cls is None:
            raise KeyError(f"Unknown fixture: {fixture_id}")
        return cls()

    def get_all_fixture_ids(self) -> list[str]:
        _ensure_loaded()
        return sorted(_FIXTURE_CLASSES)


_registry = FixtureRegistry()


def get_registry() -> FixtureRegistry:
    return _registry
