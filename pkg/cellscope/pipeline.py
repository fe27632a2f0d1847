"""Run orchestration: discover files, analyze them in worker processes, write one store.

Workers only read files and compute; the parent process is the single writer
and consumes results in task order, so the store content does not depend on
the number of workers.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import TextIO

from cellscope.builtins_registry import get_registry
from cellscope.config import RunConfig
from cellscope.errors import (
    CellscopeError,
    DegenerateDocument,
    InsufficientCorpus,
    NoInputs,
)
from cellscope.ingest import (
    CellDocument,
    DocumentKind,
    discover_files,
    is_analyzable,
    load_document,
)
from cellscope.lint import discover_rules, error_rates, format_finding, lint_document
from cellscope.lint.rule_api import LintFinding, LintRule
from cellscope.metrics import (
    CellMetricVector,
    DocumentMetrics,
    document_metrics,
    parse_code_cells,
)
from cellscope.monitoring import (
    analysis_duration,
    cells_parse_failed_total,
    documents_analyzed_total,
    lint_findings_total,
    lint_rules_skipped_total,
    write_metrics_file,
)
from cellscope.pyast import SyntaxTree
from cellscope.report import ComparisonReport, build_report, write_histograms
from cellscope.stats import corpus_generators, length_subset, sample_without_replacement
from cellscope.store import ResultStore, cell_records, document_record, finding_records

logger = logging.getLogger("cellscope.pipeline")

SUFFIXES = {DocumentKind.NOTEBOOK: ".ipynb", DocumentKind.SCRIPT: ".py"}


@dataclass(frozen=True)
class AnalysisTask:
    path: str
    kind: DocumentKind
    notebook_aware: bool = False
    rules_enabled: tuple[str, ...] | None = None


@dataclass(frozen=True)
class DocumentResult:
    doc: CellDocument
    vectors: list[CellMetricVector]
    metrics: DocumentMetrics
    findings: list[LintFinding]
    skipped_rules: tuple[str, ...]
    error_total: int
    error_per_line: float | None
    elapsed: float


@dataclass(frozen=True)
class AnalysisFailure:
    path: str
    kind: DocumentKind
    error: str


@dataclass(frozen=True)
class SkippedDocument:
    path: str
    kind: DocumentKind
    reason: str


Outcome = DocumentResult | AnalysisFailure | SkippedDocument


@dataclass
class RunSummary:
    processed: int = 0
    failed: int = 0
    skipped: int = 0
    duplicates: int = 0
    cells_failed: int = 0
    elapsed: float = 0.0
    failures: list[AnalysisFailure] = field(default_factory=list)

    def describe(self) -> str:
        return (
            f"analyzed {self.processed} documents ({self.failed} failed, "
            f"{self.skipped} skipped, {self.duplicates} duplicate) with "
            f"{self.cells_failed} unparsable cells in {self.elapsed:.2f}s"
        )


# ───────────────────────── worker side ──────────────────────


@lru_cache(maxsize=8)
def _rules(enabled: tuple[str, ...] | None) -> tuple[LintRule, ...]:
    return tuple(discover_rules(enabled).values())


def analyze_document(
    doc: CellDocument,
    rules: Sequence[LintRule],
    notebook_aware: bool = False,
) -> DocumentResult:
    """Metrics, findings and error summary of one parsed document.

    Notebook findings are always marked by the notebook-context pass; the
    ``notebook_aware`` flag decides whether marked findings leave the error total.
    """
    start = time.perf_counter()
    registry = get_registry()
    parsed = parse_code_cells(doc)
    vectors, metrics = document_metrics(doc, parsed, registry)
    trees = {
        pc.cell.index: (pc.result.module if isinstance(pc.result, SyntaxTree) else None)
        for pc in parsed
    }
    run = lint_document(
        doc, rules, notebook_aware=True, cell_trees=trees, registry=registry
    )
    try:
        error_total, per_line = error_rates(
            run.findings, metrics, include_suppressed=not notebook_aware
        )
        error_per_line: float | None = per_line
    except DegenerateDocument as e:
        error_total, error_per_line = e.total, None
    return DocumentResult(
        doc=doc,
        vectors=vectors,
        metrics=metrics,
        findings=run.findings,
        skipped_rules=run.skipped_rules,
        error_total=error_total,
        error_per_line=error_per_line,
        elapsed=time.perf_counter() - start,
    )


def analyze_path(task: AnalysisTask) -> Outcome:
    """Process entry point; failures come back as values, never as exceptions."""
    try:
        doc = load_document(task.path)
        if not is_analyzable(doc):
            return SkippedDocument(
                task.path, task.kind, f"kernel language {doc.language_tag or 'unknown'!r}"
            )
        return analyze_document(doc, _rules(task.rules_enabled), task.notebook_aware)
    except (CellscopeError, OSError) as e:
        return AnalysisFailure(task.path, task.kind, str(e))
    except Exception as e:
        return AnalysisFailure(task.path, task.kind, f"{type(e).__name__}: {e}")


# ───────────────────────── parent side ──────────────────────


def check_roots(roots: Iterable[str]) -> None:
    missing = [root for root in roots if not Path(root).exists()]
    if missing:
        raise NoInputs(missing)


def collect_tasks(config: RunConfig) -> list[AnalysisTask]:
    """Notebook files first, then scripts, each in sorted path order."""
    rules = tuple(config.rules_enabled) if config.rules_enabled is not None else None
    tasks = []
    for kind, roots in (
        (DocumentKind.NOTEBOOK, config.notebook_roots),
        (DocumentKind.SCRIPT, config.script_roots),
    ):
        paths: set[Path] = set()
        for root in roots:
            paths.update(
                discover_files(root, SUFFIXES[kind], config.include, config.exclude)
            )
        tasks += [
            AnalysisTask(str(path), kind, config.notebook_aware, rules)
            for path in sorted(paths)
        ]
    return tasks


def iter_outcomes(tasks: Sequence[AnalysisTask], workers: int) -> Iterator[Outcome]:
    """Outcomes in task order, computed inline or by a process pool."""
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            yield analyze_path(task)
        return
    chunksize = max(1, len(tasks) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        yield from executor.map(analyze_path, tasks, chunksize=chunksize)


def record_result(result: DocumentResult) -> None:
    kind = result.doc.kind.value
    documents_analyzed_total.labels(kind, "success").inc()
    analysis_duration.labels(kind).observe(result.elapsed)
    if result.metrics.failed_cells:
        cells_parse_failed_total.labels(kind).inc(result.metrics.failed_cells)
    for finding in result.findings:
        lint_findings_total.labels(finding.category.value).inc()
    for rule_id in result.skipped_rules:
        lint_rules_skipped_total.labels(rule_id).inc()


def analyze(config: RunConfig) -> RunSummary:
    """Analyze every discovered document and write its records to the store."""
    check_roots([*config.notebook_roots, *config.script_roots])
    tasks = collect_tasks(config)
    logger.info("Discovered %d files (%d workers)", len(tasks), config.workers)

    summary = RunSummary()
    start = time.perf_counter()
    seen: dict[str, str] = {}
    with ResultStore(config.store_path) as store:
        for outcome in iter_outcomes(tasks, config.workers):
            if isinstance(outcome, AnalysisFailure):
                logger.warning("Failed to analyze %s: %s", outcome.path, outcome.error)
                documents_analyzed_total.labels(outcome.kind.value, "error").inc()
                summary.failed += 1
                summary.failures.append(outcome)
                continue
            if isinstance(outcome, SkippedDocument):
                logger.info("Skipped %s: %s", outcome.path, outcome.reason)
                documents_analyzed_total.labels(outcome.kind.value, "skipped").inc()
                summary.skipped += 1
                continue

            doc = outcome.doc
            if doc.doc_id in seen:
                logger.info(
                    "Skipped %s: same content as %s", doc.origin_path, seen[doc.doc_id]
                )
                summary.duplicates += 1
                continue
            seen[doc.doc_id] = doc.origin_path

            store.replace_document(
                document_record(doc, outcome.metrics, outcome.error_total, outcome.error_per_line),
                cell_records(doc, outcome.vectors, store_source=config.store_source),
                finding_records(doc.doc_id, outcome.findings),
            )
            record_result(outcome)
            summary.processed += 1
            summary.cells_failed += outcome.metrics.failed_cells

    summary.elapsed = time.perf_counter() - start
    logger.info("Run finished: %s", summary.describe())
    if config.metrics_file:
        write_metrics_file(config.metrics_file)
    return summary


def compare(config: RunConfig, histogram_path: str | None = None) -> ComparisonReport:
    """Sample, optionally length-filter, and compare the two stored corpora.

    With ``histogram_path`` the normalized metric histograms of the compared
    documents are written there as CSV.
    """
    check_roots([config.store_path])
    with ResultStore(config.store_path) as store:
        notebooks = store.documents(DocumentKind.NOTEBOOK)
        scripts = store.documents(DocumentKind.SCRIPT)
        if len(notebooks) < 2 or len(scripts) < 2:
            raise InsufficientCorpus(len(notebooks), len(scripts))

        nb_rng, sc_rng = corpus_generators(config.seed)
        notebooks = sample_without_replacement(notebooks, config.sample_size, nb_rng)
        scripts = sample_without_replacement(scripts, config.sample_size, sc_rng)

        thresholds = None
        if config.subset_filter:
            notebooks, nb_threshold = length_subset(notebooks)
            scripts, sc_threshold = length_subset(scripts)
            thresholds = (nb_threshold, sc_threshold)
            logger.info(
                "Length filter kept %d notebooks (SLOC < %.1f), %d scripts (SLOC < %.1f)",
                len(notebooks),
                nb_threshold,
                len(scripts),
                sc_threshold,
            )
            if len(notebooks) < 2 or len(scripts) < 2:
                raise InsufficientCorpus(len(notebooks), len(scripts))

        notebook_hits = store.rule_hits(d.doc_id for d in notebooks)
        script_hits = store.rule_hits(d.doc_id for d in scripts)

    if histogram_path:
        write_histograms(histogram_path, notebooks, scripts, bins=config.histogram_bins)

    catalog = {
        rule_id: rule.category.value
        for rule_id, rule in discover_rules(config.rules_enabled).items()
    }
    return build_report(
        notebooks,
        scripts,
        notebook_hits,
        script_hits,
        catalog,
        significance=config.significance,
        alpha=config.alpha,
        k=config.top_k,
        long_file_threshold=config.long_file_threshold,
        sample_size=config.sample_size,
        seed=config.seed,
        subset_thresholds=thresholds,
    )


def rule_descriptions(enabled: Iterable[str] | None = None) -> dict[str, str]:
    return {
        rule_id: rule.description
        for rule_id, rule in discover_rules(
            list(enabled) if enabled is not None else None
        ).items()
    }


def lint_paths(paths: Sequence[str], config: RunConfig, out: TextIO) -> int:
    """Print findings of every file under ``paths``; returns the unsuppressed total."""
    check_roots(paths)
    rules = _rules(tuple(config.rules_enabled) if config.rules_enabled is not None else None)
    files: list[Path] = []
    for root in paths:
        for suffix in SUFFIXES.values():
            files.extend(discover_files(root, suffix, config.include, config.exclude))

    total = 0
    for path in sorted(set(files)):
        try:
            doc = load_document(path)
        except (CellscopeError, OSError) as e:
            logger.warning("Cannot lint %s: %s", path, e)
            continue
        if not is_analyzable(doc):
            logger.info("Skipped %s: not a Python notebook", path)
            continue
        run = lint_document(doc, rules, notebook_aware=config.notebook_aware)
        for finding in run.findings:
            out.write(format_finding(str(path), finding) + "\n")
            if not finding.suppressed:
                total += 1
    return total
