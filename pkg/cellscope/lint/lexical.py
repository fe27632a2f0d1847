"""Token stream helpers for the rules that do not need a syntax tree."""

from __future__ import annotations

import io
import keyword
import logging
import tokenize
from collections.abc import Iterator

logger = logging.getLogger("cellscope.lint.lexical")

# present on 3.12+, where f-strings are split into several tokens
FSTRING_START = getattr(tokenize, "FSTRING_START", -1)
FSTRING_END = getattr(tokenize, "FSTRING_END", -1)

SKIPPED_TYPES = frozenset(
    {
        tokenize.NL,
        tokenize.NEWLINE,
        tokenize.COMMENT,
        tokenize.INDENT,
        tokenize.DEDENT,
        tokenize.ENDMARKER,
    }
)
OPERAND_CLOSERS = frozenset({")", "]", "}"})
VALUE_KEYWORDS = frozenset({"True", "False", "None"})


def tokenize_source(text: str) -> tuple[tokenize.TokenInfo, ...]:
    """Tokens of ``text`` up to the first tokenizer error."""
    tokens: list[tokenize.TokenInfo] = []
    try:
        for token in tokenize.generate_tokens(io.StringIO(text).readline):
            tokens.append(token)
    except (tokenize.TokenError, SyntaxError) as e:
        logger.debug("Tokenizer stopped after %d tokens: %s", len(tokens), e)
    return tuple(tokens)


def code_tokens(
    tokens: tuple[tokenize.TokenInfo, ...],
) -> Iterator[tuple[int, tokenize.TokenInfo]]:
    """Yield (position, token) for tokens outside f-strings, skipping layout tokens."""
    depth = 0
    for position, token in enumerate(tokens):
        if token.type == FSTRING_START:
            depth += 1
            continue
        if token.type == FSTRING_END:
            depth -= 1
            continue
        if depth or token.type in SKIPPED_TYPES:
            continue
        yield position, token


def is_operand(token: tokenize.TokenInfo | None) -> bool:
    """Whether ``token`` can end an operand, so a following +/- is binary."""
    if token is None:
        return False
    if token.type == tokenize.NAME:
        return token.string in VALUE_KEYWORDS or not keyword.iskeyword(token.string)
    if token.type in (tokenize.NUMBER, tokenize.STRING, FSTRING_END):
        return True
    return token.type == tokenize.OP and token.string in OPERAND_CLOSERS


def char_at(lines: list[str], line: int, column: int) -> str:
    """Character at a 1-based line and 0-based column; "" past the end."""
    if not 1 <= line <= len(lines):
        return ""
    text = lines[line - 1]
    return text[column] if 0 <= column < len(text) else ""


def byte_to_char(line_text: str, byte_offset: int) -> int:
    return len(line_text.encode("utf-8")[:byte_offset].decode("utf-8", errors="ignore"))


def strip_comment(text: str) -> str:
    index = text.find("#")
    return text if index < 0 else text[:index]
