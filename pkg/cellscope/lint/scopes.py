"""Two-level scope model used by the name-based rules.

Only module level and function level are distinguished; a nested function is
just another function. Comprehensions and lambdas keep their own names, except
that an assignment expression inside a comprehension binds in the enclosing scope.
"""

from __future__ import annotations

import ast
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from enum import Enum

from cellscope.pyast import ImportKind, import_bindings

FunctionNode = ast.FunctionDef | ast.AsyncFunctionDef
NESTED_SCOPES = (
    ast.FunctionDef,
    ast.AsyncFunctionDef,
    ast.Lambda,
    ast.ClassDef,
    ast.ListComp,
    ast.SetComp,
    ast.DictComp,
    ast.GeneratorExp,
)


class BindingKind(Enum):
    LOCAL = "local"  # assignment, import, definition, parameter, capture
    BLOCK = "block"  # for target, with-as, except-as


@dataclass(frozen=True, slots=True)
class Binding:
    name: str
    line: int
    column: int
    kind: BindingKind


def scope_nodes(body: list[ast.stmt]) -> Iterator[ast.AST]:
    """Every node of a scope body; nested scopes are yielded but not entered."""
    stack: list[ast.AST] = list(reversed(body))
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, NESTED_SCOPES):
            continue
        stack.extend(reversed(list(ast.iter_child_nodes(node))))


def target_names(target: ast.expr) -> Iterator[ast.Name]:
    """Names stored by an assignment target; attribute and item targets bind nothing."""
    if isinstance(target, ast.Name):
        yield target
    elif isinstance(target, ast.Tuple | ast.List):
        for element in target.elts:
            yield from target_names(element)
    elif isinstance(target, ast.Starred):
        yield from target_names(target.value)


def _targets(names: Iterator[ast.Name], kind: BindingKind) -> list[Binding]:
    return [Binding(n.id, n.lineno, n.col_offset, kind) for n in names]


def node_bindings(node: ast.AST) -> list[Binding]:
    """Bindings a single node introduces into the scope it belongs to."""
    local, block = BindingKind.LOCAL, BindingKind.BLOCK
    if isinstance(node, ast.Assign):
        return [b for t in node.targets for b in _targets(target_names(t), local)]
    if isinstance(node, ast.AugAssign | ast.NamedExpr):
        return _targets(target_names(node.target), local)
    if isinstance(node, ast.AnnAssign) and node.value is not None:
        return _targets(target_names(node.target), local)
    if isinstance(node, ast.For | ast.AsyncFor):
        return _targets(target_names(node.target), block)
    if isinstance(node, ast.With | ast.AsyncWith):
        return [
            b
            for item in node.items
            if item.optional_vars is not None
            for b in _targets(target_names(item.optional_vars), block)
        ]
    if isinstance(node, ast.ExceptHandler) and node.name:
        return [Binding(node.name, node.lineno, node.col_offset, block)]
    if isinstance(node, ast.Import | ast.ImportFrom):
        return [
            Binding(b.bound_name, node.lineno, node.col_offset, local)
            for b in import_bindings(node)
            if b.kind is not ImportKind.STAR_IMPORT
        ]
    if isinstance(node, ast.FunctionDef | ast.AsyncFunctionDef | ast.ClassDef):
        return [Binding(node.name, node.lineno, node.col_offset, local)]
    if isinstance(node, ast.MatchAs | ast.MatchStar) and node.name:
        return [Binding(node.name, node.lineno, node.col_offset, local)]
    if isinstance(node, ast.MatchMapping) and node.rest:
        return [Binding(node.rest, node.lineno, node.col_offset, local)]
    return []


def scope_bindings(body: list[ast.stmt]) -> list[Binding]:
    """All bindings of one scope body, in source position order."""
    found = [b for node in scope_nodes(body) for b in node_bindings(node)]
    return sorted(found, key=lambda b: (b.line, b.column))


def declared_outside(func: FunctionNode) -> set[str]:
    """Names a function declares ``global`` or ``nonlocal``."""
    return {
        name
        for node in scope_nodes(func.body)
        if isinstance(node, ast.Global | ast.Nonlocal)
        for name in node.names
    }


def parameters(func: FunctionNode) -> list[ast.arg]:
    args = func.args
    params = [*args.posonlyargs, *args.args]
    if args.vararg is not None:
        params.append(args.vararg)
    params.extend(args.kwonlyargs)
    if args.kwarg is not None:
        params.append(args.kwarg)
    return params


def function_bindings(func: FunctionNode) -> list[Binding]:
    """Parameters then body bindings of ``func``, minus global/nonlocal names."""
    outside = declared_outside(func)
    params = [
        Binding(a.arg, a.lineno, a.col_offset, BindingKind.LOCAL)
        for a in parameters(func)
    ]
    return [b for b in params + scope_bindings(func.body) if b.name not in outside]


def module_bindings(module: ast.Module) -> dict[str, Binding]:
    """First binding of each module-level name."""
    first: dict[str, Binding] = {}
    for binding in scope_bindings(module.body):
        first.setdefault(binding.name, binding)
    return first


def iter_functions(module: ast.Module) -> Iterator[FunctionNode]:
    for node in ast.walk(module):
        if isinstance(node, ast.FunctionDef | ast.AsyncFunctionDef):
            yield node


def iter_scope_bodies(module: ast.Module) -> Iterator[list[ast.stmt]]:
    """Module body, then every function and class body."""
    yield module.body
    for node in ast.walk(module):
        if isinstance(node, ast.FunctionDef | ast.AsyncFunctionDef | ast.ClassDef):
            yield node.body


# ───────────────────────── execution order ──────────────────


class UndefinedNameFinder(ast.NodeVisitor):
    """Walk module-level code in execution order and collect reads of unbound names.

    Function and lambda bodies are not entered. Class bodies run in a child
    scope that sees module names. After a star import nothing is reported.
    """

    def __init__(self, is_defined: Callable[[str], bool]) -> None:
        self.is_defined = is_defined
        self.scopes: list[set[str]] = [set()]
        self.inline: list[bool] = [False]  # parallel to scopes; True for comprehensions
        self.star_import = False
        self.lazy_annotations = False
        self.undefined: list[ast.Name] = []

    def _bind(self, name: str) -> None:
        self.scopes[-1].add(name)

    def _enclosing_scope(self) -> set[str]:
        """Innermost scope that is not a comprehension; walrus targets bind there."""
        for scope, inline in zip(reversed(self.scopes), reversed(self.inline), strict=True):
            if not inline:
                return scope
        return self.scopes[0]

    def _push(self, inline: bool) -> None:
        self.scopes.append(set())
        self.inline.append(inline)

    def _pop(self) -> None:
        self.scopes.pop()
        self.inline.pop()

    def _known(self, name: str) -> bool:
        return (
            self.star_import
            or any(name in scope for scope in self.scopes)
            or self.is_defined(name)
        )

    def _bind_target(self, target: ast.expr) -> None:
        if isinstance(target, ast.Name):
            self._bind(target.id)
        elif isinstance(target, ast.Tuple | ast.List):
            for element in target.elts:
                self._bind_target(element)
        elif isinstance(target, ast.Starred):
            self._bind_target(target.value)
        else:
            self.visit(target)

    def _visit_annotation(self, annotation: ast.expr | None) -> None:
        if annotation is not None and not self.lazy_annotations:
            self.visit(annotation)

    def visit_Name(self, node: ast.Name) -> None:
        if isinstance(node.ctx, ast.Store):
            self._bind(node.id)
        elif not self._known(node.id):
            self.undefined.append(node)

    def visit_Assign(self, node: ast.Assign) -> None:
        self.visit(node.value)
        for target in node.targets:
            self._bind_target(target)

    def visit_AugAssign(self, node: ast.AugAssign) -> None:
        if isinstance(node.target, ast.Name):
            if not self._known(node.target.id):
                self.undefined.append(node.target)
        else:
            self.visit(node.target)
        self.visit(node.value)
        self._bind_target(node.target)

    def visit_AnnAssign(self, node: ast.AnnAssign) -> None:
        if node.value is not None:
            self.visit(node.value)
        self._visit_annotation(node.annotation)
        if node.value is not None:
            self._bind_target(node.target)
        elif not isinstance(node.target, ast.Name):
            self.visit(node.target)

    def visit_NamedExpr(self, node: ast.NamedExpr) -> None:
        self.visit(node.value)
        self._enclosing_scope().add(node.target.id)

    def _visit_for(self, node: ast.For | ast.AsyncFor) -> None:
        self.visit(node.iter)
        self._bind_target(node.target)
        for stmt in node.body + node.orelse:
            self.visit(stmt)

    visit_For = _visit_for
    visit_AsyncFor = _visit_for

    def _visit_with(self, node: ast.With | ast.AsyncWith) -> None:
        for item in node.items:
            self.visit(item.context_expr)
            if item.optional_vars is not None:
                self._bind_target(item.optional_vars)
        for stmt in node.body:
            self.visit(stmt)

    visit_With = _visit_with
    visit_AsyncWith = _visit_with

    def visit_ExceptHandler(self, node: ast.ExceptHandler) -> None:
        if node.type is not None:
            self.visit(node.type)
        if node.name:
            self._bind(node.name)
        for stmt in node.body:
            self.visit(stmt)

    def _visit_import(self, node: ast.Import | ast.ImportFrom) -> None:
        if isinstance(node, ast.ImportFrom) and node.module == "__future__":
            if any(alias.name == "annotations" for alias in node.names):
                self.lazy_annotations = True
        for binding in import_bindings(node):
            if binding.kind is ImportKind.STAR_IMPORT:
                self.star_import = True
            else:
                self._bind(binding.bound_name)

    visit_Import = _visit_import
    visit_ImportFrom = _visit_import

    def _visit_function(self, node: FunctionNode) -> None:
        for decorator in node.decorator_list:
            self.visit(decorator)
        for default in [*node.args.defaults, *node.args.kw_defaults]:
            if default is not None:
                self.visit(default)
        for arg in parameters(node):
            self._visit_annotation(arg.annotation)
        self._visit_annotation(node.returns)
        self._bind(node.name)

    visit_FunctionDef = _visit_function
    visit_AsyncFunctionDef = _visit_function

    def visit_Lambda(self, node: ast.Lambda) -> None:
        for default in [*node.args.defaults, *node.args.kw_defaults]:
            if default is not None:
                self.visit(default)

    def visit_ClassDef(self, node: ast.ClassDef) -> None:
        for expr in [*node.decorator_list, *node.bases]:
            self.visit(expr)
        for keyword in node.keywords:
            self.visit(keyword.value)
        self._push(inline=False)
        for stmt in node.body:
            self.visit(stmt)
        self._pop()
        self._bind(node.name)

    def _visit_comprehension(
        self, generators: list[ast.comprehension], results: list[ast.expr]
    ) -> None:
        self.visit(generators[0].iter)
        self._push(inline=True)
        for position, generator in enumerate(generators):
            if position:
                self.visit(generator.iter)
            self._bind_target(generator.target)
            for condition in generator.ifs:
                self.visit(condition)
        for result in results:
            self.visit(result)
        self._pop()

    def visit_ListComp(self, node: ast.ListComp) -> None:
        self._visit_comprehension(node.generators, [node.elt])

    def visit_SetComp(self, node: ast.SetComp) -> None:
        self._visit_comprehension(node.generators, [node.elt])

    def visit_GeneratorExp(self, node: ast.GeneratorExp) -> None:
        self._visit_comprehension(node.generators, [node.elt])

    def visit_DictComp(self, node: ast.DictComp) -> None:
        self._visit_comprehension(node.generators, [node.key, node.value])

    def visit_Match(self, node: ast.Match) -> None:
        self.visit(node.subject)
        for case in node.cases:
            for sub in ast.walk(case.pattern):
                if isinstance(sub, ast.MatchAs | ast.MatchStar) and sub.name:
                    self._bind(sub.name)
                elif isinstance(sub, ast.MatchMapping) and sub.rest:
                    self._bind(sub.rest)
                elif isinstance(sub, ast.MatchValue):
                    self.visit(sub.value)
                elif isinstance(sub, ast.MatchClass):
                    self.visit(sub.cls)
            if case.guard is not None:
                self.visit(case.guard)
            for stmt in case.body:
                self.visit(stmt)


def undefined_reads(
    module: ast.Module, is_defined: Callable[[str], bool]
) -> list[ast.Name]:
    finder = UndefinedNameFinder(is_defined)
    for stmt in module.body:
        finder.visit(stmt)
    return finder.undefined
