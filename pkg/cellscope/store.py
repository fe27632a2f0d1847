"""Result store operations: idempotent writes, metric queries, CSV export.

Three tables (documents, cells, findings) in one SQLite file. A run has exactly
one writer; WAL journaling lets readers query a consistent snapshot meanwhile.
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from sqlalchemy import delete, func, select
from sqlalchemy.exc import OperationalError
from sqlalchemy.orm import Session

from cellscope.database import DatabaseManager
from cellscope.errors import (
    ForeignDocMissing,
    IOFailure,
    StorageFull,
    UnknownMetric,
)
from cellscope.ingest import CellDocument, CellType, DocumentKind
from cellscope.lint.rule_api import LintFinding
from cellscope.metrics import METRIC_NAMES, CellMetricVector, DocumentMetrics
from cellscope.models import CellRecord, DocumentRecord, FindingRecord
from cellscope.monitoring import store_writes_total

logger = logging.getLogger("cellscope.store")

DOCUMENT_COLUMNS = (
    "doc_id",
    "origin_path",
    "kind",
    "language_tag",
    "byte_size",
    *METRIC_NAMES,
    "error_total",
    "error_per_line",
    "analyzed_cells",
    "failed_cells",
)
CELL_METRIC_COLUMNS = (
    "sloc",
    "comment_loc",
    "blank_loc",
    "extended_comment_loc",
    "builtin_unique",
    "builtin_count",
    "user_unique",
    "user_count",
    "api_unique",
    "api_count",
    "other_count",
    "cyclomatic",
    "npavg_numerator",
    "npavg_denominator",
    "variables_used",
    "parse_ok",
)
CELL_COLUMNS = (
    "doc_id",
    "cell_index",
    "cell_type",
    "line_count",
    *CELL_METRIC_COLUMNS,
    "source",
)
FINDING_COLUMNS = (
    "doc_id",
    "rule_id",
    "category",
    "cell_index",
    "local_line",
    "flat_line",
    "column_offset",
    "message",
    "suppressed",
    "suppression_reason",
)
QUERYABLE_METRICS = frozenset(
    {
        *METRIC_NAMES,
        "error_total",
        "error_per_line",
        "byte_size",
        "analyzed_cells",
        "failed_cells",
    }
)


# ───────────────────────── record builders ──────────────────


def document_record(
    doc: CellDocument,
    metrics: DocumentMetrics,
    error_total: int,
    error_per_line: float | None,
) -> DocumentRecord:
    return DocumentRecord(
        doc_id=doc.doc_id,
        origin_path=doc.origin_path,
        kind=doc.kind.value,
        language_tag=doc.language_tag,
        byte_size=doc.byte_size,
        error_total=error_total,
        error_per_line=error_per_line,
        **metrics.as_dict(),
    )


def cell_records(
    doc: CellDocument,
    vectors: Sequence[CellMetricVector],
    store_source: bool = False,
) -> list[CellRecord]:
    """One row per cell of ``doc``; code cells carry their metric vector."""
    by_index = {v.cell_index: v for v in vectors}
    records = []
    for cell in doc.cells:
        record = CellRecord(
            doc_id=doc.doc_id,
            cell_index=cell.index,
            cell_type=cell.cell_type.value,
            line_count=cell.line_count,
            source=cell.source if store_source else None,
        )
        vector = by_index.get(cell.index)
        if cell.cell_type is CellType.CODE and vector is not None:
            record.sloc = vector.line_counts.sloc
            record.comment_loc = vector.line_counts.comment
            record.blank_loc = vector.line_counts.blank
            record.extended_comment_loc = vector.extended_comment_loc
            record.parse_ok = vector.parse_ok
            if vector.parse_ok:
                for name in CELL_METRIC_COLUMNS[4:14]:
                    setattr(record, name, getattr(vector, name))
                record.variables_used = ",".join(sorted(vector.variables_used))
        records.append(record)
    return records


def finding_records(doc_id: str, findings: Iterable[LintFinding]) -> list[FindingRecord]:
    return [
        FindingRecord(
            doc_id=doc_id,
            rule_id=f.rule_id,
            category=f.category.value,
            cell_index=f.cell_index,
            local_line=f.local_line,
            flat_line=f.flat_line,
            column_offset=f.column,
            message=f.message,
            suppressed=f.suppressed,
            suppression_reason=f.suppression_reason,
        )
        for f in findings
    ]


# ───────────────────────── CSV ──────────────────────────────


def csv_value(value: Any) -> str:
    """Render one value: blank for absent, reals with 6 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.6g}"
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([csv_value(v) for v in row])
            count += 1
    return count


# ───────────────────────── store ────────────────────────────


class ResultStore:
    """Single-writer store of per-document, per-cell and per-finding rows."""

    def __init__(self, path: str) -> None:
        self.path = path
        self.db = DatabaseManager(path)
        self.db.initialize()

    def __enter__(self) -> ResultStore:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def close(self) -> None:
        self.db.close()

    @contextmanager
    def _writing(self) -> Iterator[Session]:
        try:
            with self.db.session() as session:
                yield session
        except OperationalError as e:
            message = str(getattr(e, "orig", None) or e)
            if "full" in message.lower():
                raise StorageFull(message, self.path) from e
            raise IOFailure(message, self.path) from e

    @staticmethod
    def _require_documents(session: Session, doc_ids: set[str]) -> None:
        present = set(
            session.scalars(
                select(DocumentRecord.doc_id).where(DocumentRecord.doc_id.in_(doc_ids))
            )
        )
        missing = sorted(doc_ids - present)
        if missing:
            raise ForeignDocMissing(missing[0])

    # writes

    def put_document(self, record: DocumentRecord) -> None:
        """Insert or replace the row keyed by ``record.doc_id``."""
        with self._writing() as session:
            session.merge(record)
        store_writes_total.labels("documents").inc()

    def put_cells(self, records: Sequence[CellRecord]) -> None:
        """Replace every cell row of the documents these records belong to."""
        if not records:
            return
        doc_ids = {r.doc_id for r in records}
        with self._writing() as session:
            self._require_documents(session, doc_ids)
            session.execute(delete(CellRecord).where(CellRecord.doc_id.in_(doc_ids)))
            session.add_all(records)
        store_writes_total.labels("cells").inc(len(records))

    def put_findings(self, records: Sequence[FindingRecord]) -> None:
        """Replace every finding row of the documents these records belong to."""
        if not records:
            return
        doc_ids = {r.doc_id for r in records}
        with self._writing() as session:
            self._require_documents(session, doc_ids)
            session.execute(
                delete(FindingRecord).where(FindingRecord.doc_id.in_(doc_ids))
            )
            session.add_all(records)
        store_writes_total.labels("findings").inc(len(records))

    def replace_document(
        self,
        record: DocumentRecord,
        cells: Sequence[CellRecord],
        findings: Sequence[FindingRecord],
    ) -> None:
        """Write a document with all of its cells and findings in one transaction."""
        with self._writing() as session:
            session.merge(record)
            session.flush()
            session.execute(delete(CellRecord).where(CellRecord.doc_id == record.doc_id))
            session.execute(
                delete(FindingRecord).where(FindingRecord.doc_id == record.doc_id)
            )
            session.add_all(cells)
            session.add_all(findings)
        store_writes_total.labels("documents").inc()
        store_writes_total.labels("cells").inc(len(cells))
        store_writes_total.labels("findings").inc(len(findings))

    # reads

    def count_documents(self, kind: DocumentKind | None = None) -> int:
        query = select(func.count()).select_from(DocumentRecord)
        if kind is not None:
            query = query.where(DocumentRecord.kind == kind.value)
        with self.db.session() as session:
            return int(session.scalar(query) or 0)

    def query_metric(
        self, metric_name: str, kind: DocumentKind | None = None
    ) -> Iterator[tuple[str, int | float]]:
        """(doc_id, value) for every document where the metric is present."""
        if metric_name not in QUERYABLE_METRICS:
            raise UnknownMetric(metric_name)
        column = getattr(DocumentRecord, metric_name)
        query = (
            select(DocumentRecord.doc_id, column)
            .where(column.is_not(None))
            .order_by(DocumentRecord.doc_id)
        )
        if kind is not None:
            query = query.where(DocumentRecord.kind == kind.value)
        with self.db.session() as session:
            rows = session.execute(query).all()
        for doc_id, value in rows:
            yield doc_id, value

    def documents(self, kind: DocumentKind | None = None) -> list[DocumentRecord]:
        query = select(DocumentRecord).order_by(DocumentRecord.doc_id)
        if kind is not None:
            query = query.where(DocumentRecord.kind == kind.value)
        with self.db.session() as session:
            return list(session.scalars(query))

    def rule_hits(self, doc_ids: Iterable[str]) -> dict[str, list[tuple[str, str, bool]]]:
        """(rule_id, category, suppressed) of every finding, keyed by each requested doc_id."""
        hits: dict[str, list[tuple[str, str, bool]]] = {doc_id: [] for doc_id in doc_ids}
        if not hits:
            return hits
        query = (
            select(
                FindingRecord.doc_id,
                FindingRecord.rule_id,
                FindingRecord.category,
                FindingRecord.suppressed,
            )
            .where(FindingRecord.doc_id.in_(list(hits)))
            .order_by(FindingRecord.doc_id, FindingRecord.id)
        )
        with self.db.session() as session:
            for doc_id, rule_id, category, suppressed in session.execute(query):
                hits[doc_id].append((rule_id, category, bool(suppressed)))
        return hits

    # export

    def export_csv(self, directory: str | Path) -> list[Path]:
        """Write documents.csv, cells.csv and findings.csv with fixed column order."""
        out = Path(directory)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise IOFailure(str(e), str(out)) from e

        tables = (
            ("documents.csv", DocumentRecord, DOCUMENT_COLUMNS, (DocumentRecord.doc_id,)),
            (
                "cells.csv",
                CellRecord,
                CELL_COLUMNS,
                (CellRecord.doc_id, CellRecord.cell_index),
            ),
            (
                "findings.csv",
                FindingRecord,
                FINDING_COLUMNS,
                (
                    FindingRecord.doc_id,
                    FindingRecord.cell_index,
                    FindingRecord.local_line,
                    FindingRecord.rule_id,
                    FindingRecord.column_offset,
                    FindingRecord.message,
                ),
            ),
        )
        written = []
        with self.db.session() as session:
            for filename, model, columns, order in tables:
                query = select(*(getattr(model, c) for c in columns)).order_by(*order)
                path = out / filename
                try:
                    count = write_csv(path, columns, session.execute(query))
                except OSError as e:
                    raise IOFailure(str(e), str(path)) from e
                logger.info("Exported %d rows to %s", count, path)
                written.append(path)
        return written
