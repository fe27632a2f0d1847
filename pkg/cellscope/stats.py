"""Descriptive statistics, Welch t-tests and issue-frequency tables for two corpora."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any, TypeVar

import numpy as np
from scipy.special import betainc

from cellscope.errors import (
    DegenerateVariance,
    EmptyCorpus,
    EmptySample,
    InsufficientSample,
)
from cellscope.lint.rule_api import Category

logger = logging.getLogger("cellscope.stats")

T = TypeVar("T")

SIGNIFICANCE = 0.001
P_FLOOR = 1e-300
CATEGORY_ORDER = tuple(c.value for c in Category)

# (rule_id, category, suppressed) of one finding
RuleHit = tuple[str, str, bool]


@dataclass(frozen=True, slots=True)
class SampleDescriptor:
    n: int
    mean: float
    sd: float  # n - 1 denominator; 0 for a single value
    median: float


def describe(values: Iterable[float]) -> SampleDescriptor:
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        raise EmptySample("cannot describe an empty sample")
    sd = float(np.std(data, ddof=1)) if data.size > 1 else 0.0
    return SampleDescriptor(
        n=int(data.size),
        mean=float(np.mean(data)),
        sd=sd,
        median=float(np.median(data)),
    )


@dataclass(frozen=True, slots=True)
class TTestResult:
    t: float
    df: float
    p: float  # two-sided
    significant: bool
    degenerate: bool = False  # both samples had zero variance


def _two_sided_p(t: float, df: float) -> float:
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return 0.0 if p < P_FLOOR else min(p, 1.0)


def welch_t(
    a: Sequence[float],
    b: Sequence[float],
    significance: float = SIGNIFICANCE,
    strict: bool = False,
) -> TTestResult:
    """Unequal-variance two-sample t-test with Welch–Satterthwaite degrees of freedom.

    When both variances are zero the result is flagged ``degenerate`` (t=0, p=1
    for equal means, t=±inf, p=0 otherwise); ``strict`` raises instead.
    """
    if len(a) < 2 or len(b) < 2:
        raise InsufficientSample(len(a), len(b))
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    n_a, n_b = xa.size, xb.size
    mean_a, mean_b = float(np.mean(xa)), float(np.mean(xb))
    var_a, var_b = float(np.var(xa, ddof=1)), float(np.var(xb, ddof=1))

    if var_a == 0.0 and var_b == 0.0:
        means_equal = mean_a == mean_b
        if strict:
            raise DegenerateVariance(means_equal)
        df = float(n_a + n_b - 2)
        if means_equal:
            return TTestResult(0.0, df, 1.0, 1.0 <= significance, degenerate=True)
        t = math.copysign(math.inf, mean_a - mean_b)
        return TTestResult(t, df, 0.0, True, degenerate=True)

    se_a, se_b = var_a / n_a, var_b / n_b
    pooled = se_a + se_b
    t = (mean_a - mean_b) / math.sqrt(pooled)
    df = pooled * pooled / (se_a * se_a / (n_a - 1) + se_b * se_b / (n_b - 1))
    p = _two_sided_p(t, df)
    return TTestResult(t, df, p, p <= significance)


# ───────────────────────── issue frequency ──────────────────


@dataclass(frozen=True, slots=True)
class IssueFrequencyRow:
    rule_id: str
    category: str
    pct_notebooks: float
    pct_scripts: float
    mean_pct: float


def _share(
    hits_by_doc: Mapping[str, Sequence[RuleHit]], include_suppressed: bool
) -> dict[str, int]:
    """Number of documents with at least one counted finding, per rule."""
    docs_with: dict[str, int] = {}
    for hits in hits_by_doc.values():
        rules = {rule for rule, _, suppressed in hits if include_suppressed or not suppressed}
        for rule in rules:
            docs_with[rule] = docs_with.get(rule, 0) + 1
    return docs_with


def issue_frequency(
    notebooks: Mapping[str, Sequence[RuleHit]],
    scripts: Mapping[str, Sequence[RuleHit]],
    include_suppressed: bool = False,
    catalog: Mapping[str, str] | None = None,
) -> list[IssueFrequencyRow]:
    """Percentage of documents per corpus with at least one finding of each rule.

    ``catalog`` maps rule ids to categories so rules that never fire still get
    a row; rules seen only in findings take their category from the findings.
    """
    if not notebooks or not scripts:
        raise EmptyCorpus(
            f"issue frequency needs both corpora (notebooks={len(notebooks)}, "
            f"scripts={len(scripts)})"
        )
    categories = dict(catalog or {})
    for corpus in (notebooks, scripts):
        for hits in corpus.values():
            for rule, category, _ in hits:
                categories.setdefault(rule, category)

    in_notebooks = _share(notebooks, include_suppressed)
    in_scripts = _share(scripts, include_suppressed)
    rows = []
    for rule in sorted(categories):
        pct_nb = 100.0 * in_notebooks.get(rule, 0) / len(notebooks)
        pct_sc = 100.0 * in_scripts.get(rule, 0) / len(scripts)
        rows.append(
            IssueFrequencyRow(rule, categories[rule], pct_nb, pct_sc, (pct_nb + pct_sc) / 2)
        )
    return rows


def top_k(rows: Iterable[IssueFrequencyRow], k: int = 5) -> dict[str, list[IssueFrequencyRow]]:
    """Per category, the ``k`` rules with the highest mean frequency."""
    grouped: dict[str, list[IssueFrequencyRow]] = {}
    for row in rows:
        grouped.setdefault(row.category, []).append(row)
    order = [c for c in CATEGORY_ORDER if c in grouped]
    order += sorted(c for c in grouped if c not in CATEGORY_ORDER)
    return {
        category: sorted(grouped[category], key=lambda r: (-r.mean_pct, r.rule_id))[:k]
        for category in order
    }


# ───────────────────────── corpus shaping ───────────────────


def _sloc(doc: Any) -> float:
    return float(doc.sloc)


def length_subset(
    docs: Sequence[T], sloc: Callable[[T], float] = _sloc
) -> tuple[list[T], float]:
    """Keep documents strictly shorter than MEAN + SD of the corpus SLOC.

    Returns the kept documents and the threshold used.
    """
    if not docs:
        raise EmptyCorpus("length subset of an empty corpus")
    stats = describe(sloc(d) for d in docs)
    threshold = stats.mean + stats.sd
    return [d for d in docs if sloc(d) < threshold], threshold


def long_file_share(values: Iterable[float], threshold: float) -> float:
    """Fraction of values strictly above ``threshold``."""
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        raise EmptySample("long-file share of an empty sample")
    return float(np.count_nonzero(data > threshold)) / data.size


def histogram(values: Iterable[float], bins: int = 20) -> list[tuple[float, float, float]]:
    """(bin start, bin end, count / max count) over equal-width bins."""
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        return []
    counts, edges = np.histogram(data, bins=bins)
    peak = counts.max()
    return [
        (float(edges[i]), float(edges[i + 1]), float(counts[i]) / peak)
        for i in range(len(counts))
    ]


def corpus_generators(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent PCG64 streams for the notebook and script corpora."""
    nb_seq, sc_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(nb_seq), np.random.default_rng(sc_seq)


def sample_without_replacement(
    items: Sequence[T], size: int | None, rng: np.random.Generator
) -> list[T]:
    """Subset of ``size`` items drawn without replacement, original order kept."""
    if size is None or size >= len(items):
        if size is not None and size > len(items):
            logger.warning(
                "Sample size %d exceeds corpus of %d; using the whole corpus",
                size,
                len(items),
            )
        return list(items)
    chosen = np.sort(rng.choice(len(items), size=size, replace=False))
    return [items[int(i)] for i in chosen]
