"""Style rule engine over the cell-concatenated source of a document."""

from cellscope.lint.engine import (
    apply_notebook_context,
    error_rates,
    flatten,
    format_finding,
    lint_document,
    run_checks,
)
from cellscope.lint.rule_api import Category, FlatSource, LintFinding, LintRule
from cellscope.lint.rule_loader import discover_rules

__all__ = [
    "Category",
    "FlatSource",
    "LintFinding",
    "LintRule",
    "apply_notebook_context",
    "discover_rules",
    "error_rates",
    "flatten",
    "format_finding",
    "lint_document",
    "run_checks",
]
