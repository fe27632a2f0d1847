"""Structural metrics: per-cell vectors, function taxonomy, document aggregation.

Line metrics cover every code cell. Metrics read from the syntax tree cover only
cells that parse, so a notebook with one broken cell still gets function and
complexity values from the rest.
"""

from __future__ import annotations

import dataclasses
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Any

from cellscope.builtins_registry import BuiltinRegistry, get_registry
from cellscope.ingest import Cell, CellDocument, CellType, DocumentKind
from cellscope.pyast import (
    CallShape,
    CallSite,
    CellFacts,
    FunctionDef,
    ImportBinding,
    ImportKind,
    LineCounts,
    ParseFailure,
    SyntaxTree,
    classify_lines,
    extract_facts,
    parse_cell,
)

logger = logging.getLogger("cellscope.metrics")


class FunctionCategory(Enum):
    BUILT_IN = "builtin"
    USER_DEFINED = "user"
    API = "api"
    OTHER = "other"


# ───────────────────────── classification ───────────────────


@dataclass(frozen=True, slots=True)
class DocumentContext:
    """Imports and definitions from every cell, shared by all cells of a document."""

    imports: tuple[ImportBinding, ...]
    def_names: frozenset[str]
    registry: BuiltinRegistry

    @property
    def from_import_names(self) -> frozenset[str]:
        return frozenset(
            b.bound_name for b in self.imports if b.kind is ImportKind.FROM_IMPORT
        )

    @property
    def module_import_names(self) -> frozenset[str]:
        return frozenset(
            b.bound_name for b in self.imports if b.kind is ImportKind.MODULE_IMPORT
        )


def classify_call(
    call: CallSite,
    imports: Sequence[ImportBinding],
    defs: Iterable[str],
    registry: BuiltinRegistry,
) -> FunctionCategory:
    return _classify(
        call,
        frozenset(defs),
        frozenset(b.bound_name for b in imports if b.kind is ImportKind.FROM_IMPORT),
        frozenset(b.bound_name for b in imports if b.kind is ImportKind.MODULE_IMPORT),
        registry,
    )


def _classify(
    call: CallSite,
    def_names: frozenset[str],
    from_imports: frozenset[str],
    module_imports: frozenset[str],
    registry: BuiltinRegistry,
) -> FunctionCategory:
    if call.shape is CallShape.PLAIN_NAME:
        name = call.full_name
        if name in def_names:
            return FunctionCategory.USER_DEFINED
        if name in registry:
            return FunctionCategory.BUILT_IN
        if name in from_imports:
            return FunctionCategory.API
        return FunctionCategory.OTHER
    if call.head and call.head in module_imports:
        return FunctionCategory.API
    return FunctionCategory.OTHER


# ───────────────────────── per cell ─────────────────────────


@dataclass(frozen=True, slots=True)
class ParsedCell:
    cell: Cell
    result: SyntaxTree | ParseFailure
    facts: CellFacts | None

    @property
    def parse_ok(self) -> bool:
        return self.facts is not None


def parse_code_cells(doc: CellDocument) -> list[ParsedCell]:
    parsed = []
    for cell in doc.code_cells:
        result = parse_cell(cell.source)
        if isinstance(result, ParseFailure):
            logger.debug(
                "Cell %d of %s does not parse (line %d: %s)",
                cell.index,
                doc.origin_path,
                result.line,
                result.message,
            )
            parsed.append(ParsedCell(cell, result, None))
        else:
            parsed.append(ParsedCell(cell, result, extract_facts(result)))
    return parsed


def build_context(
    parsed: Sequence[ParsedCell], registry: BuiltinRegistry | None = None
) -> DocumentContext:
    imports: list[ImportBinding] = []
    def_names: set[str] = set()
    for pc in parsed:
        if pc.facts is None:
            continue
        imports.extend(pc.facts.imports)
        def_names.update(d.name for d in pc.facts.defs)
    return DocumentContext(
        tuple(imports), frozenset(def_names), registry or get_registry()
    )


@dataclass(frozen=True, slots=True)
class CellMetricVector:
    cell_index: int
    line_counts: LineCounts
    extended_comment_loc: int
    builtin_unique: int = 0
    builtin_count: int = 0
    user_unique: int = 0
    user_count: int = 0
    api_unique: int = 0
    api_count: int = 0
    other_count: int = 0
    cyclomatic: int | None = None
    npavg_numerator: int = 0
    npavg_denominator: int = 0
    variables_used: frozenset[str] = frozenset()
    defs: tuple[FunctionDef, ...] = ()
    parse_ok: bool = False


def cell_metrics(
    cell: Cell,
    context: DocumentContext,
    preceding_markdown_lines: int,
    parsed: ParsedCell | None = None,
) -> CellMetricVector:
    """Metric vector of one code cell, classifying its calls with document context."""
    if cell.cell_type is not CellType.CODE:
        raise ValueError(f"cell {cell.index} is not a code cell")
    counts = classify_lines(cell.source)
    extended = counts.comment + preceding_markdown_lines
    if parsed is None:
        result = parse_cell(cell.source)
        facts = None if isinstance(result, ParseFailure) else extract_facts(result)
    else:
        facts = parsed.facts
    if facts is None:
        return CellMetricVector(cell.index, counts, extended)

    from_imports = context.from_import_names
    module_imports = context.module_import_names
    by_category: dict[FunctionCategory, list[str]] = {c: [] for c in FunctionCategory}
    for call in facts.calls:
        category = _classify(
            call, context.def_names, from_imports, module_imports, context.registry
        )
        by_category[category].append(call.full_name)

    def tally(category: FunctionCategory) -> tuple[int, int]:
        names = by_category[category]
        return len(set(names)), len(names)

    builtin_unique, builtin_count = tally(FunctionCategory.BUILT_IN)
    user_unique, user_count = tally(FunctionCategory.USER_DEFINED)
    api_unique, api_count = tally(FunctionCategory.API)
    return CellMetricVector(
        cell_index=cell.index,
        line_counts=counts,
        extended_comment_loc=extended,
        builtin_unique=builtin_unique,
        builtin_count=builtin_count,
        user_unique=user_unique,
        user_count=user_count,
        api_unique=api_unique,
        api_count=api_count,
        other_count=len(by_category[FunctionCategory.OTHER]),
        cyclomatic=1 + facts.decision_count,
        npavg_numerator=sum(d.param_count for d in facts.defs),
        npavg_denominator=len(facts.defs),
        variables_used=facts.variables_used,
        defs=facts.defs,
        parse_ok=True,
    )


# ───────────────────────── coupling ─────────────────────────


def mean_pairwise_overlap(sets: Sequence[frozenset[str]]) -> float:
    """Mean intersection size over unordered pairs; 0.0 with fewer than two sets."""
    if len(sets) < 2:
        return 0.0
    total = 0
    pairs = 0
    for left, right in combinations(sets, 2):
        total += len(left & right)
        pairs += 1
    return total / pairs


def function_coupling(defs: Sequence[FunctionDef]) -> float:
    return mean_pairwise_overlap([d.calls_inside for d in defs])


def cell_coupling(cells: Sequence[CellMetricVector]) -> float:
    return mean_pairwise_overlap([c.variables_used for c in cells if c.parse_ok])


# ───────────────────────── aggregation ──────────────────────

SUM_METRICS = (
    "sloc",
    "comment_loc",
    "extended_comment_loc",
    "blank_loc",
    "builtin_unique",
    "builtin_count",
    "user_unique",
    "user_count",
    "api_unique",
    "api_count",
    "other_count",
)
# every Sum metric except SLOC itself is also reported per source line
NORMALIZED_METRICS = SUM_METRICS[1:]


@dataclass(frozen=True, slots=True)
class DocumentMetrics:
    sloc: int = 0
    comment_loc: int = 0
    extended_comment_loc: int = 0
    blank_loc: int = 0
    builtin_unique: int = 0
    builtin_count: int = 0
    user_unique: int = 0
    user_count: int = 0
    api_unique: int = 0
    api_count: int = 0
    other_count: int = 0
    cyclomatic: int | None = None
    function_coupling: float = 0.0
    cell_coupling: float | None = None
    npavg: float | None = None
    comment_loc_per_line: float | None = None
    extended_comment_loc_per_line: float | None = None
    blank_loc_per_line: float | None = None
    builtin_unique_per_line: float | None = None
    builtin_count_per_line: float | None = None
    user_unique_per_line: float | None = None
    user_count_per_line: float | None = None
    api_unique_per_line: float | None = None
    api_count_per_line: float | None = None
    other_count_per_line: float | None = None
    analyzed_cells: int = 0
    failed_cells: int = 0

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


METRIC_NAMES = tuple(
    f.name
    for f in dataclasses.fields(DocumentMetrics)
    if f.name not in {"analyzed_cells", "failed_cells"}
)


def aggregate(per_cell: Sequence[CellMetricVector], doc: CellDocument) -> DocumentMetrics:
    """Fold per-cell vectors into document values and their per-SLOC variants."""
    ok = [c for c in per_cell if c.parse_ok]
    raw: dict[str, int] = {
        "sloc": sum(c.line_counts.sloc for c in per_cell),
        "comment_loc": sum(c.line_counts.comment for c in per_cell),
        "extended_comment_loc": sum(c.extended_comment_loc for c in per_cell),
        "blank_loc": sum(c.line_counts.blank for c in per_cell),
    }
    for name in SUM_METRICS[4:]:
        raw[name] = sum(getattr(c, name) for c in ok)

    sloc = raw["sloc"]
    normalized: dict[str, float | None] = {
        f"{name}_per_line": (raw[name] / sloc if sloc else None)
        for name in NORMALIZED_METRICS
    }
    numerator = sum(c.npavg_numerator for c in ok)
    denominator = sum(c.npavg_denominator for c in ok)
    cyclomatic = max((c.cyclomatic for c in ok if c.cyclomatic is not None), default=None)

    return DocumentMetrics(
        **raw,
        cyclomatic=cyclomatic,
        function_coupling=function_coupling([d for c in ok for d in c.defs]),
        cell_coupling=(
            cell_coupling(per_cell) if doc.kind is DocumentKind.NOTEBOOK else None
        ),
        npavg=numerator / denominator if denominator else None,
        **normalized,
        analyzed_cells=len(per_cell),
        failed_cells=len(per_cell) - len(ok),
    )


def markdown_runs(doc: CellDocument) -> dict[int, int]:
    """Lines of the contiguous markdown run directly above each code cell."""
    runs: dict[int, int] = {}
    pending = 0
    for cell in doc.cells:
        if cell.cell_type is CellType.MARKDOWN:
            pending += cell.line_count
        elif cell.cell_type is CellType.CODE:
            runs[cell.index] = pending
            pending = 0
        else:
            pending = 0
    return runs


def document_metrics(
    doc: CellDocument,
    parsed: Sequence[ParsedCell] | None = None,
    registry: BuiltinRegistry | None = None,
) -> tuple[list[CellMetricVector], DocumentMetrics]:
    """Compute every cell vector of ``doc`` and their aggregate."""
    parsed = parse_code_cells(doc) if parsed is None else parsed
    context = build_context(parsed, registry)
    runs = markdown_runs(doc)
    vectors = [
        cell_metrics(pc.cell, context, runs.get(pc.cell.index, 0), parsed=pc)
        for pc in parsed
    ]
    return vectors, aggregate(vectors, doc)
