"""
Batch drivers behind the `count`, `scan` and `construct` subcommands, plus
CSV/JSON emission.

Every scan cell (q, size, trial) draws its point set from its own seed,
derive_seed(seed, cell_code(q, size, trial)), so rows do not depend on the
worker count or the order in which cells finish.
"""
import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from constructions import (ConstructionReport, minkowski_distance_set, null_product_set,
                           ratio_map_census, sharpness_even, sharpness_odd, sharpness_simplex)
from data_contracts import CSV_SCHEMA_VERSION, CountRow, RunConfig, ScanRow
from errors import BudgetExceeded, FqGeomError, InfeasibleCount
from geometry import PointSet, QuadraticForm, dot_form
from groups import GroupVariant, orthogonal_group
from pointset_io import read_pointset
from sampling import SplitMix64, derive_seed, random_subset
from simplices import CongruenceMode, ClassCount, count_congruence_classes, count_similarity_classes

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _exact_or_fast(E: PointSet, k: int, Q: QuadraticForm, mode: str, group: str,
                   budget: int) -> Tuple[ClassCount, Optional[ClassCount]]:
    """(fast count, exact count or None when not requested or over budget)"""
    fast = count_congruence_classes(E, k, Q)
    if mode != "exact":
        return fast, None
    try:
        G = orthogonal_group(Q, GroupVariant(group), budget)
    except BudgetExceeded as e:
        logger.warning(f"Exact count skipped, falling back to fast mode: {e}")
        return fast, None
    return fast, count_congruence_classes(E, k, Q, CongruenceMode.EXACT_ORBIT, group=G)


# =====================================================
# COUNT
# =====================================================

def run_count(config: RunConfig, set_file: PathLike) -> CountRow:
    E = read_pointset(set_file)
    if config.k > E.dim:
        raise InfeasibleCount(f"k={config.k} exceeds the dimension {E.dim} of the point set")
    Q = dot_form(E.q, E.dim)
    fast, exact = _exact_or_fast(E, config.k, Q, config.mode, config.group, config.group_budget)
    split = exact if exact is not None else fast
    row = CountRow(
        q=E.q, d=E.dim, k=config.k, set_size=len(E),
        mode=config.mode if exact is not None else "fast",
        group=config.group,
        T_fast=fast.total,
        T_exact=exact.total if exact is not None else None,
        S_count=count_similarity_classes(E, config.k, Q),
        degenerate_classes=split.degenerate_classes,
        nondegenerate_classes=split.nondegenerate_classes,
    )
    logger.info(f"count {set_file}: |E|={row.set_size} T_fast={row.T_fast} T_exact={row.T_exact}")
    return row


# =====================================================
# SCAN
# =====================================================

def cell_code(q: int, size: int, trial: int) -> int:
    """64-bit cell identifier: q in bits 40+, size in bits 16-39, trial in bits 0-15"""
    return ((q << 40) | (size << 16) | trial) & ((1 << 64) - 1)


def scan_cells(config: RunConfig) -> List[Tuple[int, int, int]]:
    """(q, size, trial) triples; a full-space size yields a single trial"""
    if not config.size_schedule:
        raise FqGeomError("scan needs a nonempty size schedule")
    cells = []
    for q in config.q_list:
        total = q ** config.d
        for size in config.size_schedule:
            if size < 0 or size > total:
                raise InfeasibleCount(f"cannot sample {size} points from F_{q}^{config.d} ({total} points)")
            trials = 1 if size == total else config.trials
            cells.extend((q, size, trial) for trial in range(trials))
    return sorted(cells)


def _scan_cell(task: Tuple[RunConfig, int, int, int]) -> ScanRow:
    config, q, size, trial = task
    started = time.perf_counter()
    seed = derive_seed(config.seed, cell_code(q, size, trial))
    E = random_subset(SplitMix64(seed), q, config.d, size)
    Q = dot_form(q, config.d)
    fast, exact = _exact_or_fast(E, config.k, Q, config.mode, config.group, config.group_budget)
    elapsed = (time.perf_counter() - started) * 1000 if config.timings else None
    return ScanRow(
        q=q, d=config.d, k=config.k, set_size=size, trial=trial, seed=seed,
        T_count=(exact if exact is not None else fast).total,
        S_count=count_similarity_classes(E, config.k, Q),
        elapsed_ms=round(elapsed, 3) if elapsed is not None else None,
    )


def run_scan(config: RunConfig) -> List[ScanRow]:
    cells = scan_cells(config)
    tasks = [(config, q, size, trial) for q, size, trial in cells]
    logger.info(f"Scanning {len(tasks)} cells with {config.worker_count} worker(s)")
    if config.worker_count > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.worker_count) as pool:
            rows = list(pool.map(_scan_cell, tasks))
    else:
        rows = [_scan_cell(t) for t in tasks]
    rows.sort(key=lambda r: (r.q, r.set_size, r.trial))
    return rows


def summarize_scan(rows: Sequence[ScanRow]) -> List[Dict[str, Any]]:
    """min / mean T_count per (q, size) and mean T_count / q^((k+1) choose 2)"""
    groups: Dict[Tuple[int, int], List[ScanRow]] = {}
    for row in rows:
        groups.setdefault((row.q, row.set_size), []).append(row)
    summary = []
    for (q, size), members in sorted(groups.items()):
        counts = [r.T_count for r in members]
        k = members[0].k
        mean = sum(counts) / len(counts)
        summary.append({
            "q": q, "set_size": size, "trials": len(counts),
            "min_T": min(counts), "mean_T": mean,
            "ratio": mean / q ** math.comb(k + 1, 2),
        })
    return summary


def mean_is_nondecreasing(summary: Sequence[Dict[str, Any]]) -> bool:
    by_q: Dict[int, List[float]] = {}
    for entry in summary:
        by_q.setdefault(entry["q"], []).append(entry["mean_T"])
    return all(all(a <= b for a, b in zip(means, means[1:])) for means in by_q.values())


# =====================================================
# CONSTRUCT
# =====================================================

CONSTRUCTION_VARIANTS = ("odd", "even", "simplex", "nullprod", "minkowski", "ratio")


def run_construct(variant: str, q: int, d: int = 2, k: int = 1,
                  interval_len: Optional[int] = None, C: float = 1.0, eps: float = 0.1,
                  X: Optional[Iterable[int]] = None, Y: Optional[Iterable[int]] = None) -> ConstructionReport:
    if variant == "odd":
        return sharpness_odd(q, d, interval_len if interval_len is not None else 2)
    if variant == "even":
        return sharpness_even(q, d, C, interval_len)
    if variant == "simplex":
        return sharpness_simplex(q, d, k, eps)
    if variant == "nullprod":
        return null_product_set(q, X if X is not None else [0, 1], Y if Y is not None else [0, 1])
    if variant == "minkowski":
        return minkowski_distance_set(q, X if X is not None else [0, 1], Y if Y is not None else [0, 1])
    if variant == "ratio":
        return ratio_map_census(q, interval_len)
    raise FqGeomError(f"unknown construction {variant!r}, expected one of {', '.join(CONSTRUCTION_VARIANTS)}")


# =====================================================
# EMISSION
# =====================================================

def format_rows(header: Sequence[str], rows: Sequence[Sequence[Any]], dicts: Sequence[Dict[str, Any]],
                output_format: str) -> str:
    """CSV (with a schema-version comment line) or a JSON array of row objects"""
    if output_format == "json":
        return json.dumps(list(dicts), sort_keys=False) + "\n"
    buffer = io.StringIO()
    buffer.write(f"# schema_version={CSV_SCHEMA_VERSION}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def format_scan(rows: Sequence[ScanRow], output_format: str, timings: bool = False) -> str:
    return format_rows(ScanRow.header(timings), [r.as_row(timings) for r in rows],
                       [r.to_dict(timings) for r in rows], output_format)


def format_count(row: CountRow, output_format: str) -> str:
    return format_rows(CountRow.header(), [row.as_row()], [row.to_dict()], output_format)


def emit(text: str, out: Optional[PathLike] = None):
    if out is None:
        print(text, end="")
        return
    Path(out).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {out}")
