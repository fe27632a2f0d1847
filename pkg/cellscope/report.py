"""Assemble the notebook-vs-script comparison and render it as text or CSV."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from cellscope.errors import StatsError
from cellscope.metrics import METRIC_NAMES
from cellscope.models import DocumentRecord
from cellscope.stats import (
    IssueFrequencyRow,
    RuleHit,
    SampleDescriptor,
    TTestResult,
    describe,
    histogram,
    issue_frequency,
    long_file_share,
    top_k,
    welch_t,
)
from cellscope.store import write_csv

logger = logging.getLogger("cellscope.report")

NOTEBOOK_ONLY_METRICS = ("cell_coupling",)
COMPARED_METRICS = tuple(m for m in METRIC_NAMES if m not in NOTEBOOK_ONLY_METRICS)
ERROR_METRICS = ("error_total", "error_per_line")

REPORT_COLUMNS = (
    "section",
    "name",
    "category",
    "value",
    "nb_n",
    "nb_mean",
    "nb_sd",
    "nb_median",
    "sc_n",
    "sc_mean",
    "sc_sd",
    "sc_median",
    "t",
    "df",
    "p",
    "significant",
    "degenerate",
    "pct_notebooks",
    "pct_scripts",
    "mean_pct",
)
HISTOGRAM_COLUMNS = ("metric", "corpus", "bin_start", "bin_end", "normalized")


@dataclass(frozen=True, slots=True)
class MetricComparison:
    metric: str
    notebooks: SampleDescriptor
    scripts: SampleDescriptor
    test: TTestResult


@dataclass
class ComparisonReport:
    notebook_count: int
    script_count: int
    metrics: list[MetricComparison] = field(default_factory=list)
    errors: list[MetricComparison] = field(default_factory=list)
    notebook_only: dict[str, SampleDescriptor] = field(default_factory=dict)
    top_raw: dict[str, list[IssueFrequencyRow]] = field(default_factory=dict)
    top_aware: dict[str, list[IssueFrequencyRow]] = field(default_factory=dict)
    long_file_share: tuple[float, float] = (0.0, 0.0)
    long_file_threshold: int = 250
    sample_size: int | None = None
    seed: int = 0
    subset_filter: bool = False
    subset_thresholds: tuple[float, float] | None = None
    significance: float = 0.001
    alpha: float = 0.005

    def comparison(self, metric: str) -> MetricComparison | None:
        for row in (*self.metrics, *self.errors):
            if row.metric == metric:
                return row
        return None


def metric_values(docs: Iterable[DocumentRecord], metric: str) -> list[float]:
    """Present values of ``metric``; documents where it is absent are left out."""
    values = []
    for doc in docs:
        value = getattr(doc, metric)
        if value is not None:
            values.append(float(value))
    return values


def compare_metric(
    metric: str,
    notebooks: Sequence[DocumentRecord],
    scripts: Sequence[DocumentRecord],
    significance: float,
) -> MetricComparison | None:
    nb_values = metric_values(notebooks, metric)
    sc_values = metric_values(scripts, metric)
    try:
        test = welch_t(nb_values, sc_values, significance=significance)
    except StatsError as e:
        logger.info("Metric %s not compared: %s", metric, e)
        return None
    return MetricComparison(metric, describe(nb_values), describe(sc_values), test)


def build_report(
    notebooks: Sequence[DocumentRecord],
    scripts: Sequence[DocumentRecord],
    notebook_hits: Mapping[str, Sequence[RuleHit]],
    script_hits: Mapping[str, Sequence[RuleHit]],
    catalog: Mapping[str, str] | None = None,
    *,
    significance: float = 0.001,
    alpha: float = 0.005,
    k: int = 5,
    long_file_threshold: int = 250,
    sample_size: int | None = None,
    seed: int = 0,
    subset_thresholds: tuple[float, float] | None = None,
) -> ComparisonReport:
    report = ComparisonReport(
        notebook_count=len(notebooks),
        script_count=len(scripts),
        long_file_threshold=long_file_threshold,
        sample_size=sample_size,
        seed=seed,
        subset_filter=subset_thresholds is not None,
        subset_thresholds=subset_thresholds,
        significance=significance,
        alpha=alpha,
    )
    for metric in COMPARED_METRICS:
        row = compare_metric(metric, notebooks, scripts, significance)
        if row is not None:
            report.metrics.append(row)
    for metric in ERROR_METRICS:
        row = compare_metric(metric, notebooks, scripts, significance)
        if row is not None:
            report.errors.append(row)
    for metric in NOTEBOOK_ONLY_METRICS:
        values = metric_values(notebooks, metric)
        if values:
            report.notebook_only[metric] = describe(values)

    report.long_file_share = (
        long_file_share((d.sloc for d in notebooks), long_file_threshold),
        long_file_share((d.sloc for d in scripts), long_file_threshold),
    )
    report.top_raw = top_k(
        issue_frequency(notebook_hits, script_hits, include_suppressed=True, catalog=catalog),
        k,
    )
    report.top_aware = top_k(
        issue_frequency(notebook_hits, script_hits, include_suppressed=False, catalog=catalog),
        k,
    )
    return report


# ───────────────────────── text ─────────────────────────────


def _num(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.2f}"


def format_p(p: float) -> str:
    if p < 0.001:
        return "p < .001"
    text = f"{p:.3f}"
    return f"p = {text[1:] if text.startswith('0') else text}"


def format_descriptor(d: SampleDescriptor) -> str:
    return f"M={_num(d.mean)}, SD={_num(d.sd)}"


def format_test(t: TTestResult) -> str:
    return f"t({_num(t.df)})={_num(t.t)}, {format_p(t.p)}"


def apa_summary(row: MetricComparison) -> str:
    """Inline summary: ``notebooks M=.., SD=..; scripts M=.., SD=..; t(df)=.., p = ..``."""
    return (
        f"notebooks {format_descriptor(row.notebooks)}; "
        f"scripts {format_descriptor(row.scripts)}; {format_test(row.test)}"
    )


def _bold_max(own: float, other: float) -> str:
    text = f"{own:.1f}"
    return f"**{text}**" if own >= other and own > 0 else text


def frequency_table(
    top: Mapping[str, Sequence[IssueFrequencyRow]],
    descriptions: Mapping[str, str] | None = None,
) -> list[str]:
    """Rule, description, notebook %, script % per category; the larger share in bold."""
    descriptions = descriptions or {}
    lines = []
    for category, rows in top.items():
        lines.append(f"  {category}")
        lines.append(f"    {'rule':<8} {'description':<48} {'notebooks':>11} {'scripts':>11}")
        for row in rows:
            lines.append(
                f"    {row.rule_id:<8} {descriptions.get(row.rule_id, ''):<48.48} "
                f"{_bold_max(row.pct_notebooks, row.pct_scripts):>11} "
                f"{_bold_max(row.pct_scripts, row.pct_notebooks):>11}"
            )
    return lines


def render_text(
    report: ComparisonReport, descriptions: Mapping[str, str] | None = None
) -> str:
    sample = "all" if report.sample_size is None else str(report.sample_size)
    if report.subset_thresholds is None:
        subset = "off"
    else:
        nb, sc = report.subset_thresholds
        subset = f"SLOC < {_num(nb)} (notebooks), < {_num(sc)} (scripts)"
    lines = [
        f"Corpora: {report.notebook_count} notebooks, {report.script_count} scripts",
        f"Sample: {sample} per corpus, seed {report.seed}; length filter: {subset}",
        f"Significant when p <= {report.significance:g} (alpha {report.alpha:g})",
        "",
        "Metrics",
    ]
    width = max((len(r.metric) for r in (*report.metrics, *report.errors)), default=0)
    for row in report.metrics:
        mark = " *" if row.test.significant else ""
        lines.append(f"  {row.metric:<{width}}  {apa_summary(row)}{mark}")
    lines += ["", "Errors"]
    for row in report.errors:
        mark = " *" if row.test.significant else ""
        lines.append(f"  {row.metric:<{width}}  {apa_summary(row)}{mark}")
    if report.notebook_only:
        lines += ["", "Notebook only"]
        for metric, d in report.notebook_only.items():
            lines.append(f"  {metric:<{width}}  {format_descriptor(d)}, Mdn={_num(d.median)}")
    nb_long, sc_long = report.long_file_share
    lines += [
        "",
        f"Long files (> {report.long_file_threshold} SLOC): "
        f"notebooks {100 * nb_long:.1f}%, scripts {100 * sc_long:.1f}%",
        "",
        "Most frequent issues, suppressed findings counted (% of files)",
        *frequency_table(report.top_raw, descriptions),
        "",
        "Most frequent issues, notebook-aware (% of files)",
        *frequency_table(report.top_aware, descriptions),
        "",
        "NOEFFECT reports what WPS428 and W0104 both flag, once.",
    ]
    return "\n".join(lines) + "\n"


# ───────────────────────── CSV ──────────────────────────────


def _comparison_row(section: str, row: MetricComparison) -> dict[str, Any]:
    nb, sc, t = row.notebooks, row.scripts, row.test
    return {
        "section": section,
        "name": row.metric,
        "nb_n": nb.n,
        "nb_mean": nb.mean,
        "nb_sd": nb.sd,
        "nb_median": nb.median,
        "sc_n": sc.n,
        "sc_mean": sc.mean,
        "sc_sd": sc.sd,
        "sc_median": sc.median,
        "t": t.t,
        "df": t.df,
        "p": t.p,
        "significant": t.significant,
        "degenerate": t.degenerate,
    }


def report_rows(report: ComparisonReport) -> list[dict[str, Any]]:
    rows: list[dict[str, Any]] = [
        {"section": "corpus", "name": "notebooks", "value": report.notebook_count},
        {"section": "corpus", "name": "scripts", "value": report.script_count},
        {"section": "parameter", "name": "sample_size", "value": report.sample_size},
        {"section": "parameter", "name": "seed", "value": report.seed},
        {"section": "parameter", "name": "subset_filter", "value": report.subset_filter},
        {"section": "parameter", "name": "significance", "value": report.significance},
        {"section": "parameter", "name": "alpha", "value": report.alpha},
    ]
    if report.subset_thresholds is not None:
        nb, sc = report.subset_thresholds
        rows.append({"section": "parameter", "name": "subset_threshold_notebooks", "value": nb})
        rows.append({"section": "parameter", "name": "subset_threshold_scripts", "value": sc})
    rows += [_comparison_row("metric", r) for r in report.metrics]
    rows += [_comparison_row("error", r) for r in report.errors]
    for metric, d in report.notebook_only.items():
        rows.append(
            {
                "section": "notebook_only",
                "name": metric,
                "nb_n": d.n,
                "nb_mean": d.mean,
                "nb_sd": d.sd,
                "nb_median": d.median,
            }
        )
    rows.append(
        {
            "section": "long_files",
            "name": "sloc",
            "value": report.long_file_threshold,
            "pct_notebooks": 100 * report.long_file_share[0],
            "pct_scripts": 100 * report.long_file_share[1],
        }
    )
    for section, top in (("issues_raw", report.top_raw), ("issues_aware", report.top_aware)):
        for category, frequency_rows in top.items():
            for f in frequency_rows:
                rows.append(
                    {
                        "section": section,
                        "name": f.rule_id,
                        "category": category,
                        "pct_notebooks": f.pct_notebooks,
                        "pct_scripts": f.pct_scripts,
                        "mean_pct": f.mean_pct,
                    }
                )
    return rows


def write_report_csv(report: ComparisonReport, path: str | Path) -> int:
    rows = ([row.get(c) for c in REPORT_COLUMNS] for row in report_rows(report))
    count = write_csv(Path(path), REPORT_COLUMNS, rows)
    logger.info("Wrote %d report rows to %s", count, path)
    return count


def write_histograms(
    path: str | Path,
    notebooks: Sequence[DocumentRecord],
    scripts: Sequence[DocumentRecord],
    bins: int = 20,
    metrics: Sequence[str] = METRIC_NAMES,
) -> int:
    """Per metric and corpus, bin counts normalized to the tallest bin."""

    def rows() -> Iterable[tuple[Any, ...]]:
        for metric in metrics:
            for corpus, docs in (("notebooks", notebooks), ("scripts", scripts)):
                for start, end, normalized in histogram(metric_values(docs, metric), bins):
                    yield metric, corpus, start, end, normalized

    count = write_csv(Path(path), HISTOGRAM_COLUMNS, rows())
    logger.info("Wrote %d histogram bins to %s", count, path)
    return count
