"""Turn ``.ipynb`` and ``.py`` files into one uniform cell-based document model.

A script is presented as a notebook with a single code cell, so every later
stage works on the same structure.
"""

from __future__ import annotations

import codecs
import fnmatch
import hashlib
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import nbformat
from nbformat.reader import NotJSONError, parse_json

from cellscope.errors import EncodingError, MalformedJson, UnsupportedFormat

logger = logging.getLogger("cellscope.ingest")

SUPPORTED_NBFORMAT = 4
SKIPPED_FILENAMES = frozenset({"__init__.py", "setup.py"})


class DocumentKind(Enum):
    NOTEBOOK = "notebook"
    SCRIPT = "script"


class CellType(Enum):
    CODE = "code"
    MARKDOWN = "markdown"
    RAW = "raw"


def split_lines(text: str) -> list[str]:
    """LF-split ``text``, dropping one trailing empty segment."""
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


def normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


@dataclass(frozen=True, slots=True)
class Cell:
    index: int
    cell_type: CellType
    source: str
    line_count: int

    @classmethod
    def build(cls, index: int, cell_type: CellType, source: str) -> Cell:
        source = normalize_newlines(source)
        return cls(index, cell_type, source, len(split_lines(source)))


@dataclass(frozen=True, slots=True)
class CellDocument:
    doc_id: str
    origin_path: str
    kind: DocumentKind
    language_tag: str
    cells: tuple[Cell, ...]
    byte_size: int

    @property
    def code_cells(self) -> tuple[Cell, ...]:
        return tuple(c for c in self.cells if c.cell_type is CellType.CODE)


# ───────────────────────── parsing ──────────────────────────


def _decode(data: bytes, path: str) -> str:
    if data.startswith(codecs.BOM_UTF8):
        data = data[len(codecs.BOM_UTF8) :]
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise EncodingError(f"invalid UTF-8 at byte {e.start}", path) from e


def _doc_id(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _language_tag(metadata: Any) -> str:
    if not isinstance(metadata, dict):
        return ""
    kernelspec = metadata.get("kernelspec")
    if isinstance(kernelspec, dict):
        language = kernelspec.get("language")
        if isinstance(language, str) and language:
            return language.lower()
    language_info = metadata.get("language_info")
    if isinstance(language_info, dict):
        name = language_info.get("name")
        if isinstance(name, str) and name:
            return name.lower()
    return ""


def _cell_type(raw: Any) -> CellType:
    try:
        return CellType(raw)
    except ValueError:
        # anything that is neither code nor markdown carries no analyzable content
        return CellType.RAW


def parse_notebook(data: bytes, path: str) -> CellDocument:
    """Parse nbformat v4 JSON into a CellDocument of kind NOTEBOOK."""
    text = _decode(data, path)
    try:
        raw = parse_json(text)
    except NotJSONError as e:
        raise MalformedJson("not a JSON document", path) from e

    if not isinstance(raw, dict):
        raise UnsupportedFormat("top-level JSON value is not an object", path)
    major = raw.get("nbformat")
    if major != SUPPORTED_NBFORMAT:
        raise UnsupportedFormat(f"nbformat {major!r} is not supported", path)
    if not isinstance(raw.get("cells"), list):
        raise UnsupportedFormat('no top-level "cells" array', path)
    if not all(isinstance(c, dict) for c in raw["cells"]):
        raise UnsupportedFormat("cells must be JSON objects", path)

    try:
        # joins list-of-strings sources in order, without separators
        node = nbformat.v4.to_notebook_json(raw)
    except (TypeError, AttributeError) as e:
        raise UnsupportedFormat(f"malformed cell content: {e}", path) from e

    cells = []
    for index, cell in enumerate(node.cells):
        source = cell.get("source", "")
        if not isinstance(source, str):
            raise UnsupportedFormat(f"cell {index} source is not text", path)
        cells.append(Cell.build(index, _cell_type(cell.get("cell_type")), source))

    return CellDocument(
        doc_id=_doc_id(data),
        origin_path=path,
        kind=DocumentKind.NOTEBOOK,
        language_tag=_language_tag(raw.get("metadata")),
        cells=tuple(cells),
        byte_size=len(data),
    )


def parse_script(data: bytes, path: str) -> CellDocument:
    """Wrap a whole script as a single code cell. Never fails on valid UTF-8."""
    text = _decode(data, path)
    return CellDocument(
        doc_id=_doc_id(data),
        origin_path=path,
        kind=DocumentKind.SCRIPT,
        language_tag="python",
        cells=(Cell.build(0, CellType.CODE, text),),
        byte_size=len(data),
    )


def is_analyzable(doc: CellDocument) -> bool:
    return doc.kind is DocumentKind.SCRIPT or doc.language_tag.lower() == "python"


def load_document(path: str | Path) -> CellDocument:
    """Read ``path`` and dispatch on its suffix."""
    p = Path(path)
    data = p.read_bytes()
    if p.suffix.lower() == ".ipynb":
        return parse_notebook(data, str(p))
    return parse_script(data, str(p))


# ───────────────────────── discovery ────────────────────────


def _matches(rel: str, patterns: Sequence[str]) -> bool:
    name = rel.rsplit("/", 1)[-1]
    return any(
        fnmatch.fnmatch(rel, pattern) or fnmatch.fnmatch(name, pattern)
        for pattern in patterns
    )


def discover_files(
    root: str | Path,
    suffix: str,
    include: Sequence[str] = ("*",),
    exclude: Sequence[str] = (),
) -> Iterator[Path]:
    """Yield files under ``root`` with ``suffix`` in sorted order.

    ``include``/``exclude`` globs are matched against the root-relative POSIX
    path and against the bare file name. ``__init__.py`` and ``setup.py`` are
    always skipped.
    """
    base = Path(root)
    candidates = [base] if base.is_file() else sorted(base.rglob(f"*{suffix}"))
    for path in candidates:
        if not path.is_file() or path.suffix.lower() != suffix:
            continue
        if path.name in SKIPPED_FILENAMES:
            continue
        rel = path.name if path == base else path.relative_to(base).as_posix()
        if not _matches(rel, include):
            continue
        if exclude and _matches("/" + rel, exclude):
            logger.debug("Excluded by pattern: %s", path)
            continue
        yield path
