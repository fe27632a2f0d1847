"""Command-line entry point: ``cellscope analyze|compare|lint|export``."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from typing import Any, NoReturn

from cellscope import __version__
from cellscope.builtins_registry import get_registry
from cellscope.config import RunConfig, load_config
from cellscope.errors import CellscopeError, ConfigError
from cellscope.logging_config import setup_logging
from cellscope.pipeline import (
    analyze,
    check_roots,
    compare,
    lint_paths,
    rule_descriptions,
)
from cellscope.report import render_text, write_report_csv
from cellscope.store import ResultStore

logger = logging.getLogger("cellscope.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ENVIRONMENT = 2


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _comma_list(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _version() -> str:
    return f"cellscope {__version__} (builtins: Python {get_registry().language_version})"


def _common_options() -> argparse.ArgumentParser:
    # unset flags stay out of the namespace
    common = _Parser(add_help=False)
    common.add_argument(
        "--config", default=argparse.SUPPRESS, help="YAML config file (default ./cellscope.yaml)"
    )
    common.add_argument(
        "--log-level", dest="log_level", default=argparse.SUPPRESS,
        help="DEBUG, INFO, WARNING or ERROR",
    )
    common.add_argument(
        "--store", dest="store_path", default=argparse.SUPPRESS, help="SQLite result store"
    )
    common.add_argument(
        "--rules", dest="rules_enabled", type=_comma_list, default=argparse.SUPPRESS,
        help="comma list of rule ids to run",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(
        prog="cellscope",
        description=(
            "Compare Jupyter notebooks and Python scripts by code metrics and lint "
            "findings. Every setting can also come from the YAML config or a "
            "CELLSCOPE_* environment variable."
        ),
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=_version())
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("analyze", parents=[common], help="analyze files into the store")
    p.add_argument(
        "--notebooks", dest="notebook_roots", action="append", metavar="PATH",
        help="notebook root (repeatable)",
    )
    p.add_argument(
        "--scripts", dest="script_roots", action="append", metavar="PATH",
        help="script root (repeatable)",
    )
    p.add_argument("--include", type=_comma_list, help="comma list of globs to include")
    p.add_argument("--exclude", type=_comma_list, help="comma list of globs to exclude")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")
    p.add_argument(
        "--notebook-aware", dest="notebook_aware", action=argparse.BooleanOptionalAction,
        help="leave suppressed findings out of error totals",
    )
    p.add_argument(
        "--store-source", dest="store_source", action="store_true", default=None,
        help="keep cell source text in the store",
    )
    p.add_argument("--metrics-file", dest="metrics_file", help="Prometheus textfile output")

    p = commands.add_parser(
        "compare", parents=[common], help="compare the stored notebook and script corpora"
    )
    p.add_argument("--sample-size", dest="sample_size", type=int, help="documents per corpus")
    p.add_argument("--seed", type=int, help="sampling seed")
    p.add_argument(
        "--subset-filter", dest="subset_filter", action=argparse.BooleanOptionalAction,
        help="keep files with SLOC below MEAN + SD of their corpus",
    )
    p.add_argument("--top-k", dest="top_k", type=int, help="rules per category")
    p.add_argument("--significance", type=float, help="p-value threshold")
    p.add_argument("--long-file-threshold", dest="long_file_threshold", type=int)
    p.add_argument("--histogram-bins", dest="histogram_bins", type=int)
    p.add_argument("--csv", dest="csv_path", metavar="PATH", help="write the report as CSV")
    p.add_argument(
        "--histograms", dest="histogram_path", metavar="PATH",
        help="write normalized histogram bins as CSV",
    )

    p = commands.add_parser(
        "lint", parents=[common], help="print findings for files or directories"
    )
    p.add_argument("paths", nargs="+", metavar="PATH")
    p.add_argument(
        "--notebook-aware", dest="notebook_aware", action=argparse.BooleanOptionalAction,
        help="mark findings explained by notebook execution",
    )

    p = commands.add_parser("export", parents=[common], help="export the store as CSV files")
    p.add_argument("directory", metavar="DIR")
    return parser


_NOT_SETTINGS = {"command", "config", "paths", "directory", "csv_path", "histogram_path"}


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k not in _NOT_SETTINGS}


def run_analyze(config: RunConfig) -> int:
    if not config.notebook_roots and not config.script_roots:
        raise ConfigError("analyze needs at least one --notebooks or --scripts root")
    summary = analyze(config)
    print(summary.describe())
    for failure in summary.failures:
        print(f"failed: {failure.path}: {failure.error}", file=sys.stderr)
    return EXIT_OK


def run_compare(config: RunConfig, args: argparse.Namespace) -> int:
    report = compare(config, histogram_path=args.histogram_path)
    sys.stdout.write(render_text(report, rule_descriptions(config.rules_enabled)))
    if args.csv_path:
        write_report_csv(report, args.csv_path)
    return EXIT_OK


def run_lint(config: RunConfig, args: argparse.Namespace) -> int:
    total = lint_paths(args.paths, config, sys.stdout)
    logger.info("%d unsuppressed findings", total)
    return EXIT_OK


def run_export(config: RunConfig, args: argparse.Namespace) -> int:
    check_roots([config.store_path])
    with ResultStore(config.store_path) as store:
        for path in store.export_csv(args.directory):
            print(path)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(getattr(args, "config", None), **_overrides(args))
    except ConfigError as e:
        print(f"cellscope: {e}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging(config.log_level.upper())

    try:
        if args.command == "analyze":
            return run_analyze(config)
        if args.command == "compare":
            return run_compare(config, args)
        if args.command == "lint":
            return run_lint(config, args)
        return run_export(config, args)
    except ConfigError as e:
        print(f"cellscope: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CellscopeError as e:
        print(f"cellscope: {e}", file=sys.stderr)
        return EXIT_ENVIRONMENT


if __name__ == "__main__":
    sys.exit(main())
