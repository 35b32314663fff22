"""
Verification suites: exact identities checked exhaustively or on seeded random
inputs, each case reported as a SuiteResult row.

Every suite draws from its own stream, derive_seed(seed, suite cell), so a suite
gives the same rows whether it runs alone or with the others.
"""
import dataclasses
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from batch_runs import mean_is_nondecreasing, run_scan, summarize_scan
from config import DEFAULT_TOLERANCES, Tolerances
from constructions import minkowski_distance_set, null_product_set, sharpness_even, sharpness_odd, sharpness_simplex
from data_contracts import RunConfig, SuiteResult
from errors import BudgetExceeded
from geometry import PointSet, classify_form, dot_form, form_of_class, sphere_points, sphere_size_formula
from groups import (GroupVariant, brute_force_orthogonal_group, group_order_recursion, orthogonal_group,
                    reflection_closure, verify_group_axioms)
from sampling import SplitMix64, derive_seed, random_field_subset, random_function, random_subset
from simplices import (CongruenceMode, count_congruence_classes, dot_level_decomposition,
                       verify_counting_identity)
from spectral import check_mlem, check_plancherel, nu_hat_identity_check, taylor_bound_check

logger = logging.getLogger(__name__)

SUITE_ORDER = ("sphere", "groups", "identity2", "fourier", "mlem", "decomposition",
               "witt", "constructions", "sanity", "determinism")

# trials per (q, k) cell when none are given on the command line
ACCEPTANCE_TRIALS = {
    "identity2": 50,
    "fourier": 100,
    "mlem": 1000,
    "decomposition": 50,
    "witt": 50,
    "constructions": 100,
    "sanity": 5,
    "determinism": 2,
}

# cap on (tuples enumerated) x |G| for the exact-orbit suites
_EXACT_WORK = 20_000_000


def _rng(config: RunConfig, suite: str, q: int, k: int = 0) -> SplitMix64:
    cell = (SUITE_ORDER.index(suite) << 48) | (q << 8) | k
    return SplitMix64(derive_seed(config.seed, cell))


def _max_exact_size(q: int, d: int, k: int, group_order: int) -> int:
    return max(1, min(q ** d, int((_EXACT_WORK / group_order) ** (1 / (k + 1)))))


def _summary(suite: str, case: str, outcomes: Sequence[bool], lhs=None, rhs=None, detail: str = "") -> SuiteResult:
    failures = [i for i, ok in enumerate(outcomes) if not ok]
    text = f"{len(outcomes) - len(failures)}/{len(outcomes)} passed"
    if detail:
        text = f"{text}; {detail}"
    return SuiteResult(suite, case, not failures, lhs, rhs, text,
                       {"failed_trials": failures[:20]} if failures else {})


# =====================================================
# SUITES
# =====================================================

def suite_sphere(config: RunConfig, trials: int,
                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    """Enumerated sphere sizes against the closed formula, every r, both discriminant classes"""
    results = []
    for q in config.q_list:
        for d in (2, 3, 4):
            for square in (True, False):
                Q = form_of_class(q, d, square)
                fc = classify_form(Q)
                counted = np.bincount(Q.all_norms, minlength=q)
                formula = [sphere_size_formula(fc, r) for r in range(q)]
                ok = [int(c) for c in counted] == formula
                results.append(SuiteResult(
                    "sphere", f"q={q} d={d} {fc.kind.value} disc_square={square}", ok,
                    " ".join(str(int(c)) for c in counted), " ".join(str(f) for f in formula)))
    return results


def suite_groups(config: RunConfig, trials: int,
                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    results = []
    for q in config.q_list:
        for d in (2, 3):
            if d == 3 and q > 7:
                continue
            for square in (True, False):
                Q = form_of_class(q, d, square)
                expected = group_order_recursion(Q)
                try:
                    G = orthogonal_group(Q, GroupVariant.FULL, config.group_budget)
                    SO = orthogonal_group(Q, GroupVariant.SPECIAL, config.group_budget)
                except BudgetExceeded as e:
                    results.append(SuiteResult("groups", f"q={q} d={d}", True, detail=f"skipped: {e}"))
                    continue
                ratio = G.order / (2 * q ** (d * (d - 1) // 2))
                checks = [G.order == expected, 0.5 <= ratio <= 2, 2 * SO.order == G.order,
                          verify_group_axioms(G)]
                if d == 2:
                    checks.append(len(brute_force_orthogonal_group(Q)) == len(reflection_closure(Q)))
                results.append(SuiteResult(
                    "groups", f"q={q} d={d} disc_square={square}", all(checks), G.order, expected,
                    f"ratio={ratio:.4f} |SO|={SO.order}"))
    return results


def suite_identity2(config: RunConfig, trials: int,
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    """sum s(D) mu(D)^2 = sum over (theta, z) of nu^(k+1)"""
    Q3 = dot_form(3, 2)
    example = verify_counting_identity(PointSet.from_points(3, 2, [(0, 0), (1, 0)]), 1, Q3)
    results = [SuiteResult("identity2", "q=3 d=2 k=1 E={(0,0),(1,0)}", example.holds,
                           example.lhs, example.rhs)]
    variant = GroupVariant(config.group)
    for q in config.q_list:
        Q = dot_form(q, config.d)
        try:
            G = orthogonal_group(Q, variant, config.group_budget)
        except BudgetExceeded as e:
            results.append(SuiteResult("identity2", f"q={q} d={config.d}", True, detail=f"skipped: {e}"))
            continue
        for k in (1, 2):
            rng = _rng(config, "identity2", q, k)
            cap = _max_exact_size(q, config.d, k, G.order)
            outcomes, lhs, rhs = [], 0, 0
            for _ in range(trials):
                E = random_subset(rng, q, config.d, rng.randint(1, cap))
                check = verify_counting_identity(E, k, Q, group=G)
                outcomes.append(check.holds)
                lhs += check.lhs
                rhs += check.rhs
            results.append(_summary("identity2", f"q={q} d={config.d} k={k} {variant.value}",
                                    outcomes, lhs, rhs, "lhs/rhs summed over trials"))
    return results


def suite_fourier(config: RunConfig, trials: int,
                  tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    tol = tolerances
    results = []
    for q in config.q_list:
        Q = dot_form(q, config.d)
        try:
            G = orthogonal_group(Q, GroupVariant.FULL, config.group_budget)
        except BudgetExceeded as e:
            results.append(SuiteResult("fourier", f"q={q} d={config.d}", True, detail=f"skipped: {e}"))
            continue
        rng = _rng(config, "fourier", q)
        outcomes, worst = [], 0.0
        for _ in range(trials):
            E = random_subset(rng, q, config.d, rng.randint(1, q ** config.d))
            theta = G.matrices[rng.below(G.order)]
            nu_hat = nu_hat_identity_check(E, theta)
            plancherel = check_plancherel(E, tol)
            worst = max(worst, nu_hat.max_abs_error / len(E))
            outcomes.append(nu_hat.max_abs_error < tol.spectral_rel * len(E)
                            and nu_hat.modulus_error < tol.spectral_rel * len(E)
                            and plancherel.holds)
        results.append(_summary("fourier", f"q={q} d={config.d}", outcomes,
                                detail=f"max nu-hat error per point {worst:.3e}"))
    return results


def suite_mlem(config: RunConfig, trials: int,
               tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    """Planar spherical-energy bounds, and the Taylor L1 bound on random functions"""
    results = []
    tol = tolerances
    for q in config.q_list:
        rng = _rng(config, "mlem", q)
        outcomes = []
        for _ in range(trials):
            E = random_subset(rng, q, 2, rng.randint(1, q * q))
            outcomes.append(check_mlem(E, tolerances=tol).holds)
        results.append(_summary("mlem", f"q={q} d=2", outcomes))

    rng = _rng(config, "mlem", 0, 1)
    outcomes = []
    for _ in range(trials):
        values = random_function(rng, rng.randint(1, 40), scale=10.0)
        lhs, rhs = taylor_bound_check(values, rng.randint(2, 6))
        outcomes.append(lhs <= rhs * (1 + tol.spectral_rel) + tol.spectral_abs)
    results.append(_summary("mlem", "taylor L1 bound", outcomes))
    return results


def _sphere_subset(rng: SplitMix64, sphere: PointSet) -> PointSet:
    idx = sphere.indices()
    chosen = rng.sample_indices(len(idx), rng.randint(1, len(idx)))
    return PointSet.from_indices(sphere.q, sphere.dim, idx[np.asarray(chosen, dtype=np.int64)])


def suite_decomposition(config: RunConfig, trials: int,
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    """sum f^2 = S + T + R with closed forms for T and R, on subsets of the unit sphere"""
    results = []
    full = dot_level_decomposition(sphere_points(dot_form(3, 2), 1), dot_form(3, 2), radius=1)
    results.append(SuiteResult(
        "decomposition", "q=3 d=2 full unit circle", full.holds,
        full.sum_f_squared, full.S + full.T + full.R, f"S={full.S} T={full.T} R={full.R}"))

    cells = [(q, 2) for q in config.q_list]
    if 3 in config.q_list:
        cells.append((3, 3))
    for q, d in cells:
        Q = dot_form(q, d)
        sphere = sphere_points(Q, 1)
        try:
            G = orthogonal_group(Q, GroupVariant.FULL, config.group_budget)
        except BudgetExceeded as e:
            results.append(SuiteResult("decomposition", f"q={q} d={d}", True, detail=f"skipped: {e}"))
            continue
        rng = _rng(config, "decomposition", q, d)
        outcomes = []
        for _ in range(trials):
            outcomes.append(dot_level_decomposition(_sphere_subset(rng, sphere), Q, radius=1, group=G).holds)
        results.append(_summary("decomposition", f"q={q} d={d} unit sphere", outcomes))
    return results


def suite_witt(config: RunConfig, trials: int,
               tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    """Exact orbit counts agree with distance-matrix counts on non-degenerate tuples"""
    results = []
    for q in config.q_list:
        Q = dot_form(q, config.d)
        try:
            G = orthogonal_group(Q, GroupVariant.FULL, config.group_budget)
        except BudgetExceeded as e:
            results.append(SuiteResult("witt", f"q={q} d={config.d}", True, detail=f"skipped: {e}"))
            continue
        for k in range(1, min(config.d, 2) + 1):
            rng = _rng(config, "witt", q, k)
            cap = _max_exact_size(q, config.d, k, G.order)
            outcomes = []
            for _ in range(trials):
                E = random_subset(rng, q, config.d, rng.randint(1, cap))
                fast = count_congruence_classes(E, k, Q)
                exact = count_congruence_classes(E, k, Q, CongruenceMode.EXACT_ORBIT, group=G)
                outcomes.append(exact.nondegenerate_classes == fast.nondegenerate_classes
                                and exact.total >= fast.total)
            results.append(_summary("witt", f"q={q} d={config.d} k={k}", outcomes))
    return results


def suite_constructions(config: RunConfig, trials: int,
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    results = []
    for q in config.q_list:
        if q >= 5:
            report = sharpness_odd(q, 3, 2)
            results.append(SuiteResult("constructions", f"sharpness_odd q={q} d=3 |I|=2", report.passed,
                                       report.measured["T1"], report.claimed_bounds["T1"]))
        L = math.ceil(math.sqrt(q))
        report = sharpness_even(q, 2, interval_len=L)
        results.append(SuiteResult("constructions", f"sharpness_even q={q} d=2 L={L}", report.passed,
                                   report.measured["T1"], report.claimed_bounds["T1"]))
        report = sharpness_simplex(q, 2, 2, 0.1)
        results.append(SuiteResult("constructions", f"sharpness_simplex q={q} d=2 k=2", report.passed,
                                   report.measured.get("Tk_exact", report.measured["Tk_fast"]),
                                   report.claimed_bounds.get("counting_argument")))

        if q % 4 == 1:
            rng = _rng(config, "constructions", q, 1)
            outcomes = []
            for _ in range(trials):
                X = random_field_subset(rng, q, rng.randint(1, q))
                Y = random_field_subset(rng, q, rng.randint(1, q))
                outcomes.append(null_product_set(q, X, Y).passed)
            results.append(_summary("constructions", f"null_product_set q={q}", outcomes))
        else:
            rng = _rng(config, "constructions", q, 3)
            outcomes = []
            for _ in range(trials):
                X = random_field_subset(rng, q, rng.randint(1, q))
                Y = random_field_subset(rng, q, rng.randint(1, q))
                outcomes.append(minkowski_distance_set(q, X, Y).passed)
            results.append(_summary("constructions", f"minkowski_distance_set q={q}", outcomes))
    return results


def suite_sanity(config: RunConfig, trials: int,
                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    """Full-grid triangle counts and nested random samples.

    Finite-q stand-in only: the constants in the asymptotic thresholds are not validated.
    """
    results = []
    k = 2
    for q in config.q_list:
        Q = dot_form(q, 2)
        full = count_congruence_classes(PointSet.full(q, 2), k, Q).total
        results.append(SuiteResult("sanity", f"q={q} d=2 k=2 full grid", full >= q ** 3 / 2,
                                   full, q ** 3 / 2, "T >= q^3/2"))

        sizes = sorted({max(1, q * q // 4), max(1, q * q // 2), q * q})
        rng = _rng(config, "sanity", q)
        means = [0.0] * len(sizes)
        for _ in range(trials):
            # nested prefixes of one uniform permutation
            order = np.asarray(rng.sample_indices(q * q, q * q), dtype=np.int64)
            for i, size in enumerate(sizes):
                E = PointSet.from_indices(q, 2, order[:size])
                means[i] += count_congruence_classes(E, k, Q).total / trials
        monotone = all(a <= b for a, b in zip(means, means[1:]))
        results.append(SuiteResult("sanity", f"q={q} d=2 k=2 nested samples", monotone,
                                   " ".join(f"{m:.1f}" for m in means), None,
                                   "mean T by size " + " ".join(str(s) for s in sizes)))
    return results


def suite_determinism(config: RunConfig, trials: int,
                      tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    """Identical scans give identical rows; the worker count changes no count"""
    q = config.q_list[0]
    scan = RunConfig(q_list=(q,), d=2, k=1, trials=trials, seed=config.seed,
                     size_schedule=(max(1, q), q * q), worker_count=1)
    first = run_scan(scan)
    second = run_scan(scan)
    parallel = run_scan(dataclasses.replace(scan, worker_count=2))
    same = [(r.q, r.set_size, r.trial, r.seed, r.T_count, r.S_count) for r in first]
    results = [
        SuiteResult("determinism", f"q={q} repeat", first == second, len(first), len(second)),
        SuiteResult("determinism", f"q={q} workers=2", same == [
            (r.q, r.set_size, r.trial, r.seed, r.T_count, r.S_count) for r in parallel], len(first), len(parallel)),
        SuiteResult("determinism", f"q={q} scan means", mean_is_nondecreasing(summarize_scan(first)),
                    detail="full grid is the largest size"),
    ]
    return results


SUITES: Dict[str, Callable[..., List[SuiteResult]]] = {
    "sphere": suite_sphere,
    "groups": suite_groups,
    "identity2": suite_identity2,
    "fourier": suite_fourier,
    "mlem": suite_mlem,
    "decomposition": suite_decomposition,
    "witt": suite_witt,
    "constructions": suite_constructions,
    "sanity": suite_sanity,
    "determinism": suite_determinism,
}


def run_suite(name: str, config: RunConfig, trials: Optional[int] = None,
              tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}, expected one of {', '.join(SUITE_ORDER)}")
    n = trials if trials is not None else ACCEPTANCE_TRIALS.get(name, 1)
    logger.info(f"Running suite {name} (q={','.join(map(str, config.q_list))}, trials={n})")
    results = SUITES[name](config, n, tolerances)
    for r in results:
        if not r.passed:
            logger.error(f"{r.suite} {r.case} failed: lhs={r.lhs} rhs={r.rhs} {r.detail}")
    return results


def run_verify(config: RunConfig, suite: Optional[str] = None, trials: Optional[int] = None,
               tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[SuiteResult]:
    """All suites in order, or just one"""
    names = [suite] if suite else list(SUITE_ORDER)
    results: List[SuiteResult] = []
    for name in names:
        results.extend(run_suite(name, config, trials, tolerances))
    failed = sum(not r.passed for r in results)
    logger.info(f"Verification finished: {len(results) - failed}/{len(results)} cases passed")
    return results
