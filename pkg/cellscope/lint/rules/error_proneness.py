"""Rules for code that is likely to misbehave."""

from __future__ import annotations

import ast
from collections.abc import Iterable, Iterator

from cellscope.lint.rule_api import Category, RuleContext, Violation
from cellscope.lint.scopes import (
    Binding,
    BindingKind,
    function_bindings,
    iter_functions,
    module_bindings,
    scope_bindings,
    undefined_reads,
)
from cellscope.pyast import docstring_positions

NO_EFFECT_VALUES = (ast.Call, ast.Await, ast.Yield, ast.YieldFrom)


def _block_overlaps(bindings: Iterable[Binding]) -> Iterator[Binding]:
    """Block bindings of a name the scope already bound, by assignment or another block."""
    bound: set[str] = set()
    for binding in bindings:
        if binding.kind is BindingKind.BLOCK and binding.name in bound:
            yield binding
        bound.add(binding.name)


class BlockVariableOverlap:
    """A for/with/except target rebinds a name the same scope already bound."""

    rule_id = "WPS440"
    category = Category.ERROR_PRONENESS
    description = "Found block variables overlap"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        module = ctx.module
        scopes: list[list[Binding]] = [scope_bindings(module.body)]
        scopes.extend(function_bindings(func) for func in iter_functions(module))
        scopes.extend(
            scope_bindings(node.body)
            for node in ast.walk(module)
            if isinstance(node, ast.ClassDef)
        )
        for bindings in scopes:
            for b in _block_overlaps(bindings):
                yield Violation(
                    b.line, b.column, f"Found block variables overlap: {b.name}", b.name
                )


class NoEffectStatement:
    """Expression statement whose value is discarded.

    Calls, awaits, yields, ``...`` and docstrings are exempt.
    """

    rule_id = "NOEFFECT"
    category = Category.ERROR_PRONENESS
    description = "Found statement that has no effect"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        docstrings = docstring_positions(ctx.module)
        for node in ast.walk(ctx.module):
            if not isinstance(node, ast.Expr) or isinstance(node.value, NO_EFFECT_VALUES):
                continue
            if isinstance(node.value, ast.Constant) and node.value.value is Ellipsis:
                continue
            if (node.lineno, node.col_offset) in docstrings:
                continue
            yield Violation(node.lineno, node.col_offset, self.description)


class OuterScopeShadowing:
    rule_id = "WPS442"
    category = Category.ERROR_PRONENESS
    description = "Found outer scope names shadowing"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        outer = module_bindings(ctx.module)
        for func in iter_functions(ctx.module):
            reported: set[str] = set()
            for binding in function_bindings(func):
                first = outer.get(binding.name)
                if first is None or first.line >= func.lineno:
                    continue
                if binding.name in reported:
                    continue
                reported.add(binding.name)
                yield Violation(
                    binding.line,
                    binding.column,
                    f"{self.description}: {binding.name}",
                    binding.name,
                )


class UndefinedVariable:
    """Module-level read of a name nothing bound earlier in flat order."""

    rule_id = "E0602"
    category = Category.ERROR_PRONENESS
    description = "Undefined variable"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        for name in undefined_reads(ctx.module, ctx.registry.is_defined):
            yield Violation(
                name.lineno, name.col_offset, f"Undefined variable '{name.id}'", name.id
            )
