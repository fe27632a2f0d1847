"""Formatting rules. E231 and E226 read tokens only and run on unparsable sources."""

from __future__ import annotations

import ast
import tokenize
from collections.abc import Iterator

from cellscope.lint.lexical import (
    SKIPPED_TYPES,
    byte_to_char,
    char_at,
    code_tokens,
    is_operand,
    strip_comment,
)
from cellscope.lint.rule_api import Category, RuleContext, Violation

OPENERS = frozenset({"(", "[", "{"})
CLOSERS = frozenset({")", "]", "}"})
ARITHMETIC = frozenset({"+", "-", "*", "/"})
LINE_END_TYPES = frozenset({tokenize.NEWLINE, tokenize.NL, tokenize.COMMENT})


class MissingImportNewline:
    """No blank line between the last top-level import and the code after it."""

    rule_id = "I201"
    category = Category.CODE_STYLE
    description = "Missing newline between sections or imports"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        body = ctx.module.body
        imports = [
            i for i, s in enumerate(body) if isinstance(s, ast.Import | ast.ImportFrom)
        ]
        if not imports or imports[-1] + 1 >= len(body):
            return
        last_import = body[imports[-1]]
        following = body[imports[-1] + 1]
        decorators = getattr(following, "decorator_list", [])
        start = min([following.lineno, *(d.lineno for d in decorators)])
        import_end = last_import.end_lineno or last_import.lineno
        between = ctx.lines[import_end : start - 1]
        if any(not line.strip() for line in between):
            return
        yield Violation(start, following.col_offset, self.description)


class MissingWhitespaceAfterPunctuation:
    rule_id = "E231"
    category = Category.CODE_STYLE
    description = "Missing whitespace after ','"
    requires_tree = False

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        brackets: list[str] = []
        tokens = ctx.tokens
        for position, token in code_tokens(tokens):
            if token.type != tokenize.OP:
                continue
            text = token.string
            if text in OPENERS:
                brackets.append(text)
                continue
            if text in CLOSERS:
                if brackets:
                    brackets.pop()
                continue
            if text not in {",", ";", ":"}:
                continue
            line, end = token.end
            following = char_at(ctx.lines, line, end)
            if not following or following.isspace():
                continue
            if text == "," and following in ")]":
                continue
            if text == ":":
                if brackets and brackets[-1] == "[":
                    continue
                nxt = tokens[position + 1] if position + 1 < len(tokens) else None
                if nxt is None or nxt.type in LINE_END_TYPES:
                    continue
            yield Violation(
                token.start[0], token.start[1], f"Missing whitespace after '{text}'"
            )


class DottedRawImport:
    rule_id = "WPS301"
    category = Category.CODE_STYLE
    description = "Found dotted raw import"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        for node in ast.walk(ctx.module):
            if not isinstance(node, ast.Import):
                continue
            for alias in node.names:
                if alias.asname is None and "." in alias.name:
                    yield Violation(
                        node.lineno,
                        node.col_offset,
                        f"{self.description}: {alias.name}",
                        alias.name,
                    )


def _previous_significant(
    tokens: tuple[tokenize.TokenInfo, ...], position: int
) -> tokenize.TokenInfo | None:
    for index in range(position - 1, -1, -1):
        if tokens[index].type not in SKIPPED_TYPES:
            return tokens[index]
    return None


class MissingArithmeticWhitespace:
    """Binary ``+ - * /`` touching its operands on both sides."""

    rule_id = "E226"
    category = Category.CODE_STYLE
    description = "Missing whitespace around arithmetic operator"
    requires_tree = False

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        for position, token in code_tokens(ctx.tokens):
            if token.type != tokenize.OP or token.string not in ARITHMETIC:
                continue
            if not is_operand(_previous_significant(ctx.tokens, position)):
                continue
            (row, col), (end_row, end_col) = token.start, token.end
            before = char_at(ctx.lines, row, col - 1)
            after = char_at(ctx.lines, end_row, end_col)
            if before and not before.isspace() and after and not after.isspace():
                yield Violation(row, col, self.description)


def _bracketed_elements(node: ast.AST) -> tuple[list[ast.AST], str] | None:
    """Elements of a bracketed display or call, with the expected closing bracket."""
    if isinstance(node, ast.List):
        return list(node.elts), "]"
    if isinstance(node, ast.Set):
        return list(node.elts), "}"
    if isinstance(node, ast.Dict):
        return list(node.values), "}"
    if isinstance(node, ast.Tuple):
        return list(node.elts), ")"
    if isinstance(node, ast.Call):
        if (
            len(node.args) == 1
            and not node.keywords
            and isinstance(node.args[0], ast.GeneratorExp)
        ):
            return None
        return [*node.args, *node.keywords], ")"
    return None


class MissingTrailingComma:
    """Multi-line display or call whose closing bracket sits below the last element."""

    rule_id = "C812"
    category = Category.CODE_STYLE
    description = "Missing trailing comma"
    requires_tree = True

    def check(self, ctx: RuleContext) -> Iterator[Violation]:
        raw = [line.encode("utf-8") for line in ctx.lines]
        for node in ast.walk(ctx.module):
            found = _bracketed_elements(node)
            if found is None or not found[0]:
                continue
            elements, closer = found
            if not isinstance(node, ast.expr) or node.end_lineno is None:
                continue
            close_line, close_col = node.end_lineno, (node.end_col_offset or 0) - 1
            if raw[close_line - 1][close_col : close_col + 1] != closer.encode():
                continue
            if isinstance(node, ast.Tuple):
                start = raw[node.lineno - 1]
                if start[node.col_offset : node.col_offset + 1] != b"(":
                    continue
            last = max(
                elements,
                key=lambda e: (getattr(e, "end_lineno", 0), getattr(e, "end_col_offset", 0)),
            )
            last_line = getattr(last, "end_lineno", None)
            last_col = getattr(last, "end_col_offset", None)
            if last_line is None or last_col is None or last_line >= close_line:
                continue
            segments = [raw[last_line - 1][last_col:]]
            segments.extend(raw[last_line : close_line - 1])
            segments.append(raw[close_line - 1][:close_col])
            gap = "\n".join(
                strip_comment(s.decode("utf-8", errors="ignore")) for s in segments
            )
            if "," in gap:
                continue
            yield Violation(
                last_line,
                byte_to_char(ctx.lines[last_line - 1], last_col),
                self.description,
            )
