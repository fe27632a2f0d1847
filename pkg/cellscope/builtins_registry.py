"""Version-pinned list of the runtime's built-in names, shipped as package data."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from importlib.resources import files
from typing import Any

import yaml

logger = logging.getLogger("cellscope.builtins_registry")

_DATA_FILE = "builtins.yaml"


@dataclass(frozen=True, slots=True)
class BuiltinRegistry:
    language_version: str
    names: frozenset[str]  # built-in functions
    other_names: frozenset[str] = frozenset()  # exceptions, constants, module dunders

    def __post_init__(self) -> None:
        if not self.names:
            raise ValueError("builtin registry must not be empty")

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def is_defined(self, name: str) -> bool:
        """True for any name the runtime provides without an import."""
        return name in self.names or name in self.other_names

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> BuiltinRegistry:
        return cls(
            language_version=str(data["language_version"]),
            names=frozenset(data["functions"]),
            other_names=frozenset(data.get("other_names") or ()),
        )


_registry: BuiltinRegistry | None = None


def get_registry() -> BuiltinRegistry:
    """Load the embedded registry once per process."""
    global _registry
    if _registry is None:
        text = files("cellscope").joinpath("data", _DATA_FILE).read_text("utf-8")
        _registry = BuiltinRegistry.from_mapping(yaml.safe_load(text))
        logger.debug(
            "Loaded %d built-in functions for Python %s",
            len(_registry.names),
            _registry.language_version,
        )
    return _registry
