"""Run the rule set over a document's flattened code and post-process findings."""

from __future__ import annotations

import ast
import dataclasses
import logging
import warnings
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from cellscope.builtins_registry import BuiltinRegistry, get_registry
from cellscope.errors import DegenerateDocument
from cellscope.ingest import CellDocument, DocumentKind, split_lines
from cellscope.lint.lexical import tokenize_source
from cellscope.lint.rule_api import (
    FlatSource,
    LintFinding,
    LintRule,
    RuleContext,
    Violation,
)
from cellscope.lint.scopes import scope_bindings
from cellscope.metrics import DocumentMetrics
from cellscope.pyast import SyntaxTree, parse_cell

logger = logging.getLogger("cellscope.lint.engine")

CELL_TAIL_DISPLAY = "cell-tail-display"
OUT_OF_ORDER_DEFINITION = "out-of-order-definition"


def flatten(doc: CellDocument) -> FlatSource:
    """Join code cells in order; markdown and raw cells contribute nothing."""
    lines: list[str] = []
    boundary: list[tuple[int, int]] = []
    for cell in doc.code_cells:
        for local, line in enumerate(split_lines(cell.source), start=1):
            lines.append(line)
            boundary.append((cell.index, local))
    return FlatSource("\n".join(lines), tuple(boundary))


def parse_flat(text: str) -> ast.Module | None:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return ast.parse(text)
    except (SyntaxError, ValueError, RecursionError, MemoryError) as e:
        logger.debug("Flat source does not parse: %s", e)
        return None


@dataclass(frozen=True, slots=True)
class LintRun:
    findings: list[LintFinding]
    skipped_rules: tuple[str, ...] = ()


def _finding(rule: LintRule, flat: FlatSource, v: Violation) -> LintFinding:
    cell_index, local_line = flat.locate(v.line)
    return LintFinding(
        rule_id=rule.rule_id,
        category=rule.category,
        flat_line=v.line,
        cell_index=cell_index,
        local_line=local_line,
        column=v.column,
        message=v.message,
        subject=v.subject,
    )


def sort_key(f: LintFinding) -> tuple[int, str, int, str]:
    return (f.flat_line, f.rule_id, f.column, f.message)


def check_flat_source(
    flat: FlatSource,
    rules: Iterable[LintRule],
    registry: BuiltinRegistry | None = None,
    tree: ast.Module | None = None,
) -> LintRun:
    """Findings of every rule plus the ids of rules skipped for lack of a tree."""
    if tree is None:
        tree = parse_flat(flat.text)
    ctx = RuleContext(
        flat=flat,
        lines=flat.lines,
        tokens=tokenize_source(flat.text),
        tree=tree,
        registry=registry or get_registry(),
    )
    findings: list[LintFinding] = []
    skipped: list[str] = []
    for rule in rules:
        if rule.requires_tree and tree is None:
            skipped.append(rule.rule_id)
            continue
        for violation in rule.check(ctx):
            try:
                findings.append(_finding(rule, flat, violation))
            except IndexError:
                logger.debug(
                    "%s reported line %d outside the source", rule.rule_id, violation.line
                )
    findings.sort(key=sort_key)
    return LintRun(findings, tuple(skipped))


def run_checks(
    flat: FlatSource,
    rules: Iterable[LintRule],
    registry: BuiltinRegistry | None = None,
) -> list[LintFinding]:
    return check_flat_source(flat, rules, registry).findings


# ───────────────────────── notebook context ─────────────────


def names_bound_by_cell(
    doc: CellDocument, trees: Mapping[int, ast.Module | None] | None = None
) -> dict[int, frozenset[str]]:
    """Module-level names (imports included) each parsable code cell binds."""
    bound: dict[int, frozenset[str]] = {}
    for cell in doc.code_cells:
        if trees is not None and cell.index in trees:
            module = trees[cell.index]
        else:
            result = parse_cell(cell.source)
            module = result.module if isinstance(result, SyntaxTree) else None
        if module is None:
            continue
        bound[cell.index] = frozenset(b.name for b in scope_bindings(module.body))
    return bound


def _cell_tails(flat: FlatSource, tree: ast.Module | None) -> set[tuple[int, int]]:
    if tree is None:
        return set()
    last: dict[int, ast.stmt] = {}
    for stmt in tree.body:
        last[flat.locate(stmt.lineno)[0]] = stmt
    return {(stmt.lineno, stmt.col_offset) for stmt in last.values()}


def apply_notebook_context(
    findings: Iterable[LintFinding],
    flat: FlatSource,
    doc: CellDocument,
    bound_by_cell: Mapping[int, frozenset[str]],
    tree: ast.Module | None = None,
) -> list[LintFinding]:
    """Mark findings explained by notebook execution; nothing is removed."""
    findings = list(findings)
    if doc.kind is not DocumentKind.NOTEBOOK:
        return findings
    tails = _cell_tails(flat, tree if tree is not None else parse_flat(flat.text))

    def bound_later(name: str, cell_index: int) -> bool:
        return any(
            name in names for index, names in bound_by_cell.items() if index > cell_index
        )

    marked = []
    for f in findings:
        reason = None
        if f.suppressed:
            pass
        elif f.rule_id == "NOEFFECT" and (f.flat_line, f.column) in tails:
            reason = CELL_TAIL_DISPLAY
        elif f.rule_id == "E0602" and f.subject and bound_later(f.subject, f.cell_index):
            reason = OUT_OF_ORDER_DEFINITION
        if reason is None:
            marked.append(f)
        else:
            marked.append(dataclasses.replace(f, suppressed=True, suppression_reason=reason))
    return marked


# ───────────────────────── summaries ────────────────────────


def error_rates(
    findings: Iterable[LintFinding],
    doc_metrics: DocumentMetrics,
    include_suppressed: bool = False,
) -> tuple[int, float]:
    """Finding total and total per SLOC; suppressed findings count only on request."""
    total = sum(1 for f in findings if include_suppressed or not f.suppressed)
    if doc_metrics.sloc == 0:
        raise DegenerateDocument(total)
    return total, total / doc_metrics.sloc


def format_finding(path: str, f: LintFinding) -> str:
    line = f"{path}:{f.cell_index}:{f.local_line} {f.rule_id} {f.message}"
    if f.suppressed:
        line += f" [suppressed:{f.suppression_reason}]"
    return line


def lint_document(
    doc: CellDocument,
    rules: Iterable[LintRule],
    notebook_aware: bool = False,
    cell_trees: Mapping[int, ast.Module | None] | None = None,
    registry: BuiltinRegistry | None = None,
) -> LintRun:
    flat = flatten(doc)
    tree = parse_flat(flat.text)
    run = check_flat_source(flat, rules, registry, tree=tree)
    if run.skipped_rules:
        logger.debug(
            "%s: source does not parse, skipped %s",
            doc.origin_path,
            ", ".join(run.skipped_rules),
        )
    if not notebook_aware or doc.kind is not DocumentKind.NOTEBOOK:
        return run
    bound = names_bound_by_cell(doc, cell_trees)
    marked = apply_notebook_context(run.findings, flat, doc, bound, tree=tree)
    return LintRun(marked, run.skipped_rules)
