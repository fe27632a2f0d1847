"""Rules for code that works but is written the long way round."""

from __future__ import annotations

import ast
from collections.abc import Iterator
from itertools import pairwise

from cellscope.lint.rule_api import Category, RuleContext, Violation
from cellscope.lint.scopes import function_bindings, iter_functions, module_bindings


def _referenced_names(module: ast.Module) -> set[str]:
    return {
        node.id
        for node in ast.walk(module)
        if isinstance(node, ast.Name) and not isinstance(node.ctx, ast.Store)
    }


def _unused_imports(
    module: ast.Module, aliased: bool
) -> Iterator[tuple[ast.stmt, ast.alias, str]]:
    """(statement, alias, bound name) of every import whose name is never read."""
    used = _referenced_names(module)
    for node in ast.walk(module):
        if not isinstance(node, ast.Import | ast.ImportFrom):
            continue
        if isinstance(node, ast.ImportFrom) and node.module == "__future__":
            continue
        for alias in node.names:
            if alias.name == "*" or (alias.asname is not None) != aliased:
                continue
            if isinstance(node, ast.Import):
                bound = alias.asname or alias.name.split(".")[0]
            else:
                bound = alias.asname or alias.name
            if bound not in used:
                yield node, alias, bound


class UnusedImport:
    rule_id = "F401"
    category = Category.BEST_PRACTICES
    description = "Module imported but unused"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        for node, alias, bound in _unused_imports(ctx.module, aliased=False):
            qualified = alias.name
            if isinstance(node, ast.ImportFrom):
                qualified = f"{'.' * node.level}{node.module or ''}.{alias.name}"
            yield Violation(
                node.lineno, node.col_offset, f"'{qualified}' imported but unused", bound
            )


class UnusedAliasedImport:
    rule_id = "W0611"
    category = Category.BEST_PRACTICES
    description = "Unused import when preceded by import as"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        for node, alias, bound in _unused_imports(ctx.module, aliased=True):
            yield Violation(
                node.lineno,
                node.col_offset,
                f"Unused import {alias.name} as {bound}",
                bound,
            )


class RedefinedOuterName:
    """Function parameter or local named like any module-level binding."""

    rule_id = "W0621"
    category = Category.BEST_PRACTICES
    description = "Redefining name from outer scope"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        outer = module_bindings(ctx.module)
        for func in iter_functions(ctx.module):
            reported: set[str] = set()
            for binding in function_bindings(func):
                if binding.name not in outer or binding.name in reported:
                    continue
                reported.add(binding.name)
                yield Violation(
                    func.lineno,
                    func.col_offset,
                    f"Redefining name '{binding.name}' from outer scope",
                    binding.name,
                )


def _is_string_literal(node: ast.expr) -> bool:
    if isinstance(node, ast.JoinedStr):
        return True
    return isinstance(node, ast.Constant) and isinstance(node.value, str)


class StringConcatenation:
    rule_id = "WPS336"
    category = Category.BEST_PRACTICES
    description = "Found explicit string concatenation"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        for node in ast.walk(ctx.module):
            if not isinstance(node, ast.BinOp | ast.AugAssign) or not isinstance(node.op, ast.Add):
                continue
            if isinstance(node, ast.BinOp):
                operands = [node.left, node.right]
            else:
                operands = [node.value]
            if any(_is_string_literal(operand) for operand in operands):
                yield Violation(node.lineno, node.col_offset, self.description)


def _assigned_name(stmt: ast.stmt) -> str | None:
    if isinstance(stmt, ast.Assign) and len(stmt.targets) == 1:
        target = stmt.targets[0]
        return target.id if isinstance(target, ast.Name) else None
    if isinstance(stmt, ast.AnnAssign) and stmt.value is not None:
        return stmt.target.id if isinstance(stmt.target, ast.Name) else None
    return None


class UnnecessaryAssignBeforeReturn:
    rule_id = "R504"
    category = Category.BEST_PRACTICES
    description = "Unnecessary variable assignment before return statement"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        for node in ast.walk(ctx.module):
            for field in ("body", "orelse", "finalbody"):
                block = getattr(node, field, None)
                if not isinstance(block, list):
                    continue
                for first, second in pairwise(block):
                    if not (
                        isinstance(second, ast.Return)
                        and isinstance(second.value, ast.Name)
                    ):
                        continue
                    name = second.value.id
                    if _assigned_name(first) == name:
                        yield Violation(
                            second.lineno,
                            second.col_offset,
                            f"{self.description}: '{name}'",
                            name,
                        )
