"""
Light-weight public contract that every lint rule must satisfy.

A *rule* is a Python object (usually a class instance) that exposes:
    • `rule_id`       - the identifier findings are reported under, e.g. "WPS440"
    • `category`      - one of the three Category values
    • `description`   - one-line human description
    • `requires_tree` - False only for rules that work on tokens alone
    • `check(ctx)`    - returns the Violations found in the flat source

The engine discovers rules from the built-in catalog and through
`importlib.metadata.entry_points` (group ``cellscope_rules``).
"""

from __future__ import annotations

import ast
import tokenize
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

from cellscope.builtins_registry import BuiltinRegistry


class Category(Enum):
    ERROR_PRONENESS = "error-proneness"
    CODE_STYLE = "code-style"
    BEST_PRACTICES = "best-practices"


@dataclass(frozen=True, slots=True)
class FlatSource:
    """Code cells joined with LF.

    ``boundary[n - 1]`` is the (cell index, local line) of flat line n.
    """

    text: str
    boundary: tuple[tuple[int, int], ...]

    @property
    def lines(self) -> list[str]:
        return self.text.split("\n") if self.boundary else []

    def locate(self, flat_line: int) -> tuple[int, int]:
        if not 1 <= flat_line <= len(self.boundary):
            raise IndexError(f"flat line {flat_line} out of range")
        return self.boundary[flat_line - 1]


@dataclass(frozen=True, slots=True)
class Violation:
    line: int  # flat line
    column: int
    message: str
    subject: str = ""  # the name a finding is about, when there is one


@dataclass(frozen=True, slots=True)
class LintFinding:
    rule_id: str
    category: Category
    flat_line: int
    cell_index: int
    local_line: int
    column: int
    message: str
    subject: str = ""
    suppressed: bool = False
    suppression_reason: str | None = None


@dataclass(frozen=True)
class RuleContext:
    flat: FlatSource
    lines: list[str]
    tokens: tuple[tokenize.TokenInfo, ...]
    tree: ast.Module | None
    registry: BuiltinRegistry

    @property
    def module(self) -> ast.Module:
        if self.tree is None:
            raise RuntimeError("rule needs a syntax tree but the source did not parse")
        return self.tree


class LintRule(Protocol):
    rule_id: str
    category: Category
    description: str
    requires_tree: bool

    def check(self, ctx: RuleContext) -> Iterable[Violation]: ...
