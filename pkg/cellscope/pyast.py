"""Lexical line classification and syntax-tree fact extraction for one cell."""

from __future__ import annotations

import ast
import warnings
from dataclasses import dataclass, field
from enum import Enum

from cellscope.ingest import split_lines

Location = tuple[int, int]  # (line, column), cell-local, line 1-based


# ───────────────────────── line classification ──────────────


@dataclass(frozen=True, slots=True)
class LineCounts:
    sloc: int = 0
    blank: int = 0
    comment: int = 0

    @property
    def total(self) -> int:
        return self.sloc + self.blank + self.comment


def _scan_line(line: str, open_quote: str | None) -> str | None:
    """Return the triple-quote delimiter still open at the end of ``line``."""
    i = 0
    n = len(line)
    while i < n:
        if open_quote is not None:
            if line[i] == "\\":
                i += 2
                continue
            if line.startswith(open_quote, i):
                i += 3
                open_quote = None
                continue
            i += 1
            continue
        ch = line[i]
        if ch == "#":
            break
        if ch in "'\"":
            triple = ch * 3
            if line.startswith(triple, i):
                open_quote = triple
                i += 3
                continue
            # single-quoted string ends on this line (or is unterminated)
            i += 1
            while i < n and line[i] != ch:
                i += 2 if line[i] == "\\" else 1
            i += 1
            continue
        i += 1
    return open_quote


def classify_lines(source: str) -> LineCounts:
    """Assign each physical line to sloc, blank or comment.

    Purely lexical, so invalid code is fine. Lines inside a triple-quoted
    string belong to a statement and count as sloc.
    """
    sloc = blank = comment = 0
    open_quote: str | None = None
    for line in split_lines(source):
        if open_quote is None:
            stripped = line.strip()
            if not stripped:
                blank += 1
                continue
            if stripped.startswith("#"):
                comment += 1
                continue
        sloc += 1
        open_quote = _scan_line(line, open_quote)
    return LineCounts(sloc=sloc, blank=blank, comment=comment)


# ───────────────────────── parsing ──────────────────────────


@dataclass(frozen=True, slots=True)
class SyntaxTree:
    module: ast.Module
    line_total: int


@dataclass(frozen=True, slots=True)
class ParseFailure:
    line: int
    column: int
    message: str


def parse_cell(source: str) -> SyntaxTree | ParseFailure:
    """Parse ``source``; failures are returned, not raised.

    Notebook magics (``%``, ``%%``, ``!``) are not stripped and fail here.
    """
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            module = ast.parse(source)
    except SyntaxError as e:
        return ParseFailure(e.lineno or 1, (e.offset or 1) - 1, e.msg)
    except (ValueError, RecursionError, MemoryError) as e:
        return ParseFailure(1, 0, str(e) or type(e).__name__)
    return SyntaxTree(module, len(split_lines(source)))


def docstring_positions(module: ast.Module) -> set[Location]:
    """Locations of string expression statements in docstring position."""
    positions: set[Location] = set()
    bodies: list[list[ast.stmt]] = [module.body]
    for node in ast.walk(module):
        if isinstance(node, ast.FunctionDef | ast.AsyncFunctionDef | ast.ClassDef):
            bodies.append(node.body)
    for body in bodies:
        if not body:
            continue
        first = body[0]
        if (
            isinstance(first, ast.Expr)
            and isinstance(first.value, ast.Constant)
            and isinstance(first.value.value, str)
        ):
            positions.add((first.lineno, first.col_offset))
    return positions


# ───────────────────────── facts ────────────────────────────


class CallShape(Enum):
    PLAIN_NAME = "plain"
    DOTTED_PATH = "dotted"


class ImportKind(Enum):
    MODULE_IMPORT = "module"
    FROM_IMPORT = "from"
    STAR_IMPORT = "star"


@dataclass(frozen=True, slots=True)
class CallSite:
    shape: CallShape
    head: str  # "" when the callee is not rooted in an identifier
    full_name: str
    location: Location


@dataclass(frozen=True, slots=True)
class ImportBinding:
    kind: ImportKind
    bound_name: str
    source_module: str
    is_dotted: bool
    location: Location
    has_alias: bool = False


@dataclass(frozen=True, slots=True)
class FunctionDef:
    name: str
    param_count: int
    calls_inside: frozenset[str]
    location: Location


@dataclass(frozen=True, slots=True)
class CellFacts:
    calls: tuple[CallSite, ...] = ()
    imports: tuple[ImportBinding, ...] = ()
    defs: tuple[FunctionDef, ...] = ()
    names_read: frozenset[str] = frozenset()
    names_bound: frozenset[str] = frozenset()
    decision_count: int = 0
    defined_names: frozenset[str] = frozenset()  # def and class names

    @property
    def variables_used(self) -> frozenset[str]:
        return (self.names_read | self.names_bound) - self.defined_names


EXPR_PLACEHOLDER = "<expr>"


def call_site(node: ast.Call) -> CallSite:
    """Describe the callee of ``node`` as a plain name or dotted path."""
    parts: list[str] = []
    target: ast.expr = node.func
    while isinstance(target, ast.Attribute):
        parts.append(target.attr)
        target = target.value
    if isinstance(target, ast.Name):
        head = target.id
        parts.append(head)
    else:
        head = ""
        parts.append(EXPR_PLACEHOLDER)
    full_name = ".".join(reversed(parts))
    shape = CallShape.DOTTED_PATH if len(parts) > 1 else CallShape.PLAIN_NAME
    return CallSite(shape, head, full_name, (node.lineno, node.col_offset))


def call_head_name(node: ast.Call) -> ast.Name | None:
    target: ast.expr = node.func
    while isinstance(target, ast.Attribute):
        target = target.value
    return target if isinstance(target, ast.Name) else None


def param_count(args: ast.arguments) -> int:
    return (
        len(args.posonlyargs)
        + len(args.args)
        + len(args.kwonlyargs)
        + (args.vararg is not None)
        + (args.kwarg is not None)
    )


def import_bindings(node: ast.Import | ast.ImportFrom) -> list[ImportBinding]:
    location = (node.lineno, node.col_offset)
    bindings = []
    if isinstance(node, ast.Import):
        for alias in node.names:
            if alias.asname:
                bindings.append(
                    ImportBinding(
                        ImportKind.MODULE_IMPORT,
                        alias.asname,
                        alias.name,
                        False,
                        location,
                        has_alias=True,
                    )
                )
            else:
                bindings.append(
                    ImportBinding(
                        ImportKind.MODULE_IMPORT,
                        alias.name.split(".")[0],
                        alias.name,
                        "." in alias.name,
                        location,
                    )
                )
        return bindings
    module = "." * node.level + (node.module or "")
    for alias in node.names:
        if alias.name == "*":
            bindings.append(
                ImportBinding(ImportKind.STAR_IMPORT, "", module, False, location)
            )
        else:
            bindings.append(
                ImportBinding(
                    ImportKind.FROM_IMPORT,
                    alias.asname or alias.name,
                    module,
                    False,
                    location,
                    has_alias=alias.asname is not None,
                )
            )
    return bindings


def decision_points(node: ast.AST) -> int:
    """McCabe decision points contributed by ``node`` itself (not its children)."""
    if isinstance(
        node,
        ast.If
        | ast.For
        | ast.AsyncFor
        | ast.While
        | ast.ExceptHandler
        | ast.Assert
        | ast.IfExp
        | ast.match_case,
    ):
        return 1
    if isinstance(node, ast.comprehension):
        return len(node.ifs)
    if isinstance(node, ast.BoolOp):
        return len(node.values) - 1
    return 0


@dataclass
class _FactCollector(ast.NodeVisitor):
    calls: list[CallSite] = field(default_factory=list)
    imports: list[ImportBinding] = field(default_factory=list)
    defs: list[FunctionDef] = field(default_factory=list)
    names_read: set[str] = field(default_factory=set)
    names_bound: set[str] = field(default_factory=set)
    defined_names: set[str] = field(default_factory=set)
    decisions: int = 0
    call_heads: set[int] = field(default_factory=set)

    def generic_visit(self, node: ast.AST) -> None:
        self.decisions += decision_points(node)
        super().generic_visit(node)

    def visit_Call(self, node: ast.Call) -> None:
        self.calls.append(call_site(node))
        head = call_head_name(node)
        if head is not None:
            self.call_heads.add(id(head))
        self.generic_visit(node)

    def visit_Name(self, node: ast.Name) -> None:
        if isinstance(node.ctx, ast.Store):
            self.names_bound.add(node.id)
        elif id(node) not in self.call_heads:
            self.names_read.add(node.id)

    def visit_arg(self, node: ast.arg) -> None:
        self.names_bound.add(node.arg)
        self.generic_visit(node)

    def _visit_def(self, node: ast.FunctionDef | ast.AsyncFunctionDef) -> None:
        self.names_bound.add(node.name)
        self.defined_names.add(node.name)
        inside = frozenset(
            call_site(sub).full_name
            for stmt in node.body
            for sub in ast.walk(stmt)
            if isinstance(sub, ast.Call)
        )
        self.defs.append(
            FunctionDef(
                node.name,
                param_count(node.args),
                inside,
                (node.lineno, node.col_offset),
            )
        )
        self.generic_visit(node)

    visit_FunctionDef = _visit_def
    visit_AsyncFunctionDef = _visit_def

    def visit_ClassDef(self, node: ast.ClassDef) -> None:
        self.names_bound.add(node.name)
        self.defined_names.add(node.name)
        self.generic_visit(node)

    def visit_ExceptHandler(self, node: ast.ExceptHandler) -> None:
        if node.name:
            self.names_bound.add(node.name)
        self.generic_visit(node)

    def visit_MatchAs(self, node: ast.MatchAs) -> None:
        if node.name:
            self.names_bound.add(node.name)
        self.generic_visit(node)

    def visit_MatchStar(self, node: ast.MatchStar) -> None:
        if node.name:
            self.names_bound.add(node.name)
        self.generic_visit(node)

    def visit_MatchMapping(self, node: ast.MatchMapping) -> None:
        if node.rest:
            self.names_bound.add(node.rest)
        self.generic_visit(node)

    def visit_Import(self, node: ast.Import) -> None:
        self.imports.extend(import_bindings(node))

    def visit_ImportFrom(self, node: ast.ImportFrom) -> None:
        self.imports.extend(import_bindings(node))


def extract_facts(tree: SyntaxTree) -> CellFacts:
    """Collect calls, imports, definitions, names and decision points in source order."""
    collector = _FactCollector()
    collector.visit(tree.module)
    return CellFacts(
        calls=tuple(sorted(collector.calls, key=lambda c: c.location)),
        imports=tuple(collector.imports),
        defs=tuple(collector.defs),
        names_read=frozenset(collector.names_read),
        names_bound=frozenset(collector.names_bound),
        decision_count=collector.decisions,
        defined_names=frozenset(collector.defined_names),
    )
