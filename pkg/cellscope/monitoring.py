"""Prometheus collectors for analysis runs."""

from __future__ import annotations

import logging

from prometheus_client import CollectorRegistry, Counter, Histogram, Info
from prometheus_client import write_to_textfile as _write_to_textfile

import cellscope

logger = logging.getLogger("cellscope.monitoring")

REGISTRY = CollectorRegistry()

# Document processing
documents_analyzed_total = Counter(
    "documents_analyzed_total",
    "Documents read and analyzed",
    ["kind", "status"],  # status: success, error, skipped
    registry=REGISTRY,
)

cells_parse_failed_total = Counter(
    "cells_parse_failed_total",
    "Code cells whose source does not parse",
    ["kind"],
    registry=REGISTRY,
)

analysis_duration = Histogram(
    "analysis_duration_seconds",
    "Time spent analyzing one document",
    ["kind"],
    registry=REGISTRY,
)

# Lint
lint_findings_total = Counter(
    "lint_findings_total",
    "Lint findings produced, suppressed ones included",
    ["category"],
    registry=REGISTRY,
)

lint_rules_skipped_total = Counter(
    "lint_rules_skipped_total",
    "Rules skipped because the flat source did not parse",
    ["rule_id"],
    registry=REGISTRY,
)

# Store
store_writes_total = Counter(
    "store_writes_total",
    "Rows written to the result store",
    ["table"],
    registry=REGISTRY,
)

build_info = Info(
    "cellscope_build",
    "Information about the cellscope installation",
    registry=REGISTRY,
)
build_info.info({"version": cellscope.__version__})


def write_metrics_file(path: str) -> None:
    """Dump every collector in Prometheus textfile format."""
    _write_to_textfile(path, REGISTRY)
    logger.info("Wrote run metrics to %s", path)
