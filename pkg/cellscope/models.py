"""SQLAlchemy models for the result store: one row per document, cell and finding."""

from __future__ import annotations

from sqlalchemy import Boolean, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import Mapped, mapped_column

from cellscope.database import Base


class DocumentRecord(Base):
    """Aggregated metrics and error summary of one analyzed document."""

    __tablename__ = "documents"

    doc_id: Mapped[str] = mapped_column(String(64), primary_key=True)
    origin_path: Mapped[str] = mapped_column(Text, nullable=False)
    kind: Mapped[str] = mapped_column(String(16), nullable=False, index=True)
    language_tag: Mapped[str] = mapped_column(String(32), nullable=False, default="")
    byte_size: Mapped[int] = mapped_column(Integer, nullable=False)

    # Code writing
    sloc: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    comment_loc: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    extended_comment_loc: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    blank_loc: Mapped[int] = mapped_column(Integer, nullable=False, default=0)

    # Function usage
    builtin_unique: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    builtin_count: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    user_unique: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    user_count: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    api_unique: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    api_count: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    other_count: Mapped[int] = mapped_column(Integer, nullable=False, default=0)

    # Complexity
    cyclomatic: Mapped[int | None] = mapped_column(Integer)
    function_coupling: Mapped[float] = mapped_column(Float, nullable=False, default=0.0)
    cell_coupling: Mapped[float | None] = mapped_column(Float)
    npavg: Mapped[float | None] = mapped_column(Float)

    # Per source line
    comment_loc_per_line: Mapped[float | None] = mapped_column(Float)
    extended_comment_loc_per_line: Mapped[float | None] = mapped_column(Float)
    blank_loc_per_line: Mapped[float | None] = mapped_column(Float)
    builtin_unique_per_line: Mapped[float | None] = mapped_column(Float)
    builtin_count_per_line: Mapped[float | None] = mapped_column(Float)
    user_unique_per_line: Mapped[float | None] = mapped_column(Float)
    user_count_per_line: Mapped[float | None] = mapped_column(Float)
    api_unique_per_line: Mapped[float | None] = mapped_column(Float)
    api_count_per_line: Mapped[float | None] = mapped_column(Float)
    other_count_per_line: Mapped[float | None] = mapped_column(Float)

    # Lint summary
    error_total: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    error_per_line: Mapped[float | None] = mapped_column(Float)

    analyzed_cells: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    failed_cells: Mapped[int] = mapped_column(Integer, nullable=False, default=0)


class CellRecord(Base):
    """Raw per-cell values; metric columns stay NULL for markdown and raw cells."""

    __tablename__ = "cells"

    doc_id: Mapped[str] = mapped_column(
        String(64), ForeignKey("documents.doc_id", ondelete="CASCADE"), primary_key=True
    )
    cell_index: Mapped[int] = mapped_column(Integer, primary_key=True)
    cell_type: Mapped[str] = mapped_column(String(16), nullable=False)
    line_count: Mapped[int] = mapped_column(Integer, nullable=False)

    sloc: Mapped[int | None] = mapped_column(Integer)
    comment_loc: Mapped[int | None] = mapped_column(Integer)
    blank_loc: Mapped[int | None] = mapped_column(Integer)
    extended_comment_loc: Mapped[int | None] = mapped_column(Integer)
    builtin_unique: Mapped[int | None] = mapped_column(Integer)
    builtin_count: Mapped[int | None] = mapped_column(Integer)
    user_unique: Mapped[int | None] = mapped_column(Integer)
    user_count: Mapped[int | None] = mapped_column(Integer)
    api_unique: Mapped[int | None] = mapped_column(Integer)
    api_count: Mapped[int | None] = mapped_column(Integer)
    other_count: Mapped[int | None] = mapped_column(Integer)
    cyclomatic: Mapped[int | None] = mapped_column(Integer)
    npavg_numerator: Mapped[int | None] = mapped_column(Integer)
    npavg_denominator: Mapped[int | None] = mapped_column(Integer)
    variables_used: Mapped[str | None] = mapped_column(Text)  # sorted, comma-joined
    parse_ok: Mapped[bool | None] = mapped_column(Boolean)
    source: Mapped[str | None] = mapped_column(Text)


class FindingRecord(Base):
    __tablename__ = "findings"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    doc_id: Mapped[str] = mapped_column(
        String(64),
        ForeignKey("documents.doc_id", ondelete="CASCADE"),
        nullable=False,
        index=True,
    )
    rule_id: Mapped[str] = mapped_column(String(16), nullable=False, index=True)
    category: Mapped[str] = mapped_column(String(32), nullable=False)
    cell_index: Mapped[int] = mapped_column(Integer, nullable=False)
    local_line: Mapped[int] = mapped_column(Integer, nullable=False)
    flat_line: Mapped[int] = mapped_column(Integer, nullable=False)
    column_offset: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    message: Mapped[str] = mapped_column(Text, nullable=False)
    suppressed: Mapped[bool] = mapped_column(Boolean, nullable=False, default=False)
    suppression_reason: Mapped[str | None] = mapped_column(String(64))
