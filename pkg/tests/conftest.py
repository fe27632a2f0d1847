"""Shared builders for notebook and script fixtures."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator
from pathlib import Path
from typing import Any

import nbformat
import pytest
from nbformat.v4 import new_code_cell, new_markdown_cell, new_notebook

from cellscope.ingest import CellDocument, parse_notebook, parse_script

NotebookBuilder = Callable[..., CellDocument]


def notebook_bytes(*cells: Any, language: str | None = "python") -> bytes:
    """Serialize cells to nbformat v4 JSON; plain strings become code cells."""
    nb_cells = [new_code_cell(c) if isinstance(c, str) else c for c in cells]
    metadata: dict[str, Any] = {}
    if language is not None:
        metadata["kernelspec"] = {
            "name": f"{language}-kernel",
            "display_name": language,
            "language": language,
        }
    return nbformat.writes(new_notebook(cells=nb_cells, metadata=metadata)).encode("utf-8")


def md(source: str) -> Any:
    return new_markdown_cell(source)


@pytest.fixture(autouse=True)
def restore_cellscope_logger() -> Iterator[None]:
    """Drop console handlers a test installed; they point at its captured stderr."""
    logger = logging.getLogger("cellscope")
    handlers, level = list(logger.handlers), logger.level
    yield
    logger.handlers[:] = handlers
    logger.setLevel(level)


@pytest.fixture
def make_notebook() -> NotebookBuilder:
    def build(*cells: Any, language: str | None = "python", path: str = "nb.ipynb") -> CellDocument:
        return parse_notebook(notebook_bytes(*cells, language=language), path)

    return build


@pytest.fixture
def make_script() -> Callable[..., CellDocument]:
    def build(source: str, path: str = "script.py") -> CellDocument:
        return parse_script(source.encode("utf-8"), path)

    return build


@pytest.fixture
def corpus_dirs(tmp_path: Path) -> tuple[Path, Path]:
    notebooks = tmp_path / "notebooks"
    scripts = tmp_path / "scripts"
    notebooks.mkdir()
    scripts.mkdir()
    return notebooks, scripts


def write_notebook(path: Path, *cells: Any, language: str | None = "python") -> Path:
    path.write_bytes(notebook_bytes(*cells, language=language))
    return path
