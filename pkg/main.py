#!/usr/bin/env python3
"""
fqgeom command line: verification suites, class counts, seeded scans and
explicit constructions over F_q^d.

Usage:
    python main.py verify --q 3,5,7 --d 2            # all suites
    python main.py verify --q 3 --suite identity2    # one suite
    python main.py count points.txt --k 1 --mode exact
    python main.py scan --q 11 --d 2 --k 2 --sizes 40,80,121 --trials 5
    python main.py construct --variant nullprod --q 13 --X 0,1 --Y 0,1

Exit codes: 0 success, 1 an invariant or construction check failed,
2 configuration or input error.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence

# Add current directory to path
sys.path.append(str(Path(__file__).parent))

from batch_runs import (CONSTRUCTION_VARIANTS, emit, format_count, format_rows, format_scan, run_construct,
                        run_count, run_scan, summarize_scan)
from config import Config
from data_contracts import CSV_SCHEMA_VERSION, RunConfig, SuiteResult
import gf
from gf import make_field
from logging_setup import setup_logging
from verify_suites import SUITE_ORDER, run_verify

try:
    from rich.console import Console
    from rich.table import Table
    from rich import box
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVARIANT_FAILURE = 1
EXIT_CONFIG_ERROR = 2


def _int_list(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=_int_list, default=[3, 5, 7], help="Comma-separated odd primes")
    common.add_argument("--d", type=int, default=2, help="Dimension")
    common.add_argument("--k", type=int, default=1, help="Simplex size (k+1 vertices)")
    common.add_argument("--mode", choices=["fast", "exact"], default="fast", help="Congruence counting mode")
    common.add_argument("--group", choices=["O", "SO"], default="O", help="Isometry group variant")
    common.add_argument("--trials", type=int, default=None, help="Random trials per cell")
    common.add_argument("--seed", type=int, default=None, help="64-bit seed (default FQGEOM_DEFAULT_SEED)")
    common.add_argument("--format", dest="output_format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", default=None, help="Output file (default stdout)")
    common.add_argument("--timings", action="store_true", help="Add elapsed_ms to scan rows")

    parser = argparse.ArgumentParser(prog="fqgeom", description="Finite-field geometry engine")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="Run verification suites")
    verify.add_argument("--suite", choices=list(SUITE_ORDER), default=None, help="Run a single suite")

    count = sub.add_parser("count", parents=[common], help="Count classes of a point-set file")
    count.add_argument("set_file", help="Point set (.txt 'q d' format or .json)")

    scan = sub.add_parser("scan", parents=[common], help="Seeded random threshold scan")
    scan.add_argument("--sizes", type=_int_list, required=True, help="Comma-separated set sizes")

    construct = sub.add_parser("construct", parents=[common], help="Build an explicit construction")
    construct.add_argument("--variant", choices=list(CONSTRUCTION_VARIANTS), required=True)
    construct.add_argument("--interval-len", type=int, default=None)
    construct.add_argument("--C", type=float, default=1.0)
    construct.add_argument("--eps", type=float, default=0.1)
    construct.add_argument("--X", type=_int_list, default=None)
    construct.add_argument("--Y", type=_int_list, default=None)
    return parser


def _run_config(args: argparse.Namespace, config: Config) -> RunConfig:
    for q in args.q:
        make_field(q)
    return RunConfig(
        q_list=tuple(args.q),
        d=args.d,
        k=args.k,
        mode=args.mode,
        group=args.group,
        trials=args.trials if args.trials is not None else 1,
        seed=args.seed if args.seed is not None else config.DEFAULT_SEED,
        size_schedule=tuple(getattr(args, "sizes", None) or ()),
        output_format=args.output_format,
        worker_count=config.WORKERS,
        timings=args.timings,
        group_budget=config.GROUP_BUDGET,
    )


def print_summary(title: str, header: Sequence[str], rows: Sequence[Sequence[Any]]):
    """Console table on stderr, so stdout carries only the emitted rows"""
    if RICH_AVAILABLE:
        table = Table(title=title, box=box.SIMPLE)
        for name in header:
            table.add_column(str(name))
        for row in rows:
            table.add_row(*[str(v) for v in row])
        Console(stderr=True).print(table)
        return
    print(f"=== {title} ===", file=sys.stderr)
    print("  ".join(str(h) for h in header), file=sys.stderr)
    for row in rows:
        print("  ".join(str(v) for v in row), file=sys.stderr)


# =====================================================
# SUBCOMMANDS
# =====================================================

def cmd_verify(args: argparse.Namespace, run: RunConfig, config: Config) -> int:
    results: List[SuiteResult] = run_verify(run, args.suite, args.trials, config.tolerances())
    emit(format_rows(SuiteResult.header(), [r.as_row() for r in results],
                     [r.to_dict() for r in results], run.output_format), args.out)
    failed = [r for r in results if not r.passed]
    print_summary("Verification", ["suite", "case", "passed", "detail"],
                  [(r.suite, r.case, "yes" if r.passed else "NO", r.detail) for r in failed or results[-5:]])
    return EXIT_INVARIANT_FAILURE if failed else EXIT_OK


def cmd_count(args: argparse.Namespace, run: RunConfig, config: Config) -> int:
    row = run_count(run, args.set_file)
    emit(format_count(row, run.output_format), args.out)
    return EXIT_OK


def cmd_scan(args: argparse.Namespace, run: RunConfig, config: Config) -> int:
    rows = run_scan(run)
    emit(format_scan(rows, run.output_format, run.timings), args.out)
    summary = summarize_scan(rows)
    print_summary("Scan summary", ["q", "set_size", "trials", "min_T", "mean_T", "ratio"],
                  [(s["q"], s["set_size"], s["trials"], s["min_T"], f"{s['mean_T']:.2f}", f"{s['ratio']:.4f}")
                   for s in summary])
    return EXIT_OK


def cmd_construct(args: argparse.Namespace, run: RunConfig, config: Config) -> int:
    exit_code = EXIT_OK
    reports = []
    for q in run.q_list:
        report = run_construct(args.variant, q, d=run.d, k=run.k, interval_len=args.interval_len,
                               C=args.C, eps=args.eps, X=args.X, Y=args.Y)
        reports.append(report.to_json())
        if not report.passed:
            logger.error(f"{report.name} q={q} failed checks: "
                         f"{[name for name, ok in report.checks.items() if not ok]}")
            exit_code = EXIT_INVARIANT_FAILURE
    emit("\n".join(reports) + "\n", args.out)
    return exit_code


COMMANDS = {
    "verify": cmd_verify,
    "count": cmd_count,
    "scan": cmd_scan,
    "construct": cmd_construct,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI interface"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = Config()
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    setup_logging(config)
    gf.SQRT_SEARCH_LIMIT = config.SQRT_SEARCH_LIMIT
    if config.CSV_SCHEMA_VERSION != CSV_SCHEMA_VERSION:
        logger.warning(f"FQGEOM_CSV_SCHEMA_VERSION={config.CSV_SCHEMA_VERSION} requested, "
                       f"writing schema version {CSV_SCHEMA_VERSION}")

    try:
        run = _run_config(args, config)
        return COMMANDS[args.command](args, run, config)
    except ValueError as e:
        # engine errors and invalid construction parameters
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
