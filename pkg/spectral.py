"""
Discrete Fourier analysis on F_q^d.

E^(a) = q^-d sum_x E(x) chi(-a.x), chi(t) = exp(2 pi i t / q), "." the standard dot
product. The transform is evaluated by direct summation against the character
table, one coordinate axis at a time.
"""
import csv
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from config import DEFAULT_TOLERANCES, Tolerances
from errors import BadExponent, NegativeValue
from geometry import PointSet, QuadraticForm, all_points, dot_form, encode_points, null_line_basis
from simplices import nu_table

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def character_matrix(q: int) -> np.ndarray:
    """W[a, x] = chi(-a x)"""
    chi = np.exp(2j * np.pi * np.arange(q) / q)
    a = np.arange(q)
    W = chi[(-np.outer(a, a)) % q]
    W.setflags(write=False)
    return W


@dataclass(frozen=True, eq=False)
class SpectralTable:
    q: int
    dim: int
    values: np.ndarray

    def at(self, xi: Sequence[int]) -> complex:
        return complex(self.values[int(encode_points(np.asarray(xi), self.q))])

    def support(self, tol: float = 1e-9) -> np.ndarray:
        return np.flatnonzero(np.abs(self.values) > tol)


def transform_function(values: np.ndarray, q: int, d: int) -> np.ndarray:
    """q^-d sum_x f(x) chi(-xi.x) for every xi, f given by point index"""
    W = character_matrix(q)
    A = np.asarray(values, dtype=np.complex128).reshape((q,) * d)
    for axis in range(d):
        A = np.moveaxis(np.tensordot(W, A, axes=([1], [axis])), 0, axis)
    return A.reshape(-1) / q ** d


def fourier_transform(E: PointSet) -> SpectralTable:
    values = transform_function(E.membership.astype(np.float64), E.q, E.dim)
    values.setflags(write=False)
    return SpectralTable(E.q, E.dim, values)


@dataclass(frozen=True)
class PlancherelCheck:
    energy: float
    expected: float
    zero_coefficient_error: float
    tolerances: Tolerances = DEFAULT_TOLERANCES

    @property
    def holds(self) -> bool:
        rel = abs(self.energy - self.expected) / max(self.expected, self.tolerances.spectral_abs)
        return rel <= self.tolerances.spectral_rel and self.zero_coefficient_error <= self.tolerances.spectral_abs


def check_plancherel(E: PointSet, tolerances: Tolerances = DEFAULT_TOLERANCES) -> PlancherelCheck:
    table = fourier_transform(E)
    expected = len(E) / E.q ** E.dim
    return PlancherelCheck(
        energy=float(np.sum(np.abs(table.values) ** 2)),
        expected=expected,
        zero_coefficient_error=abs(table.values[0] - expected),
        tolerances=tolerances,
    )


@dataclass(frozen=True)
class NuHatCheck:
    """max_abs_error compares nu^ with q^d E^(xi) E^(-theta^T xi), which follows from the
    transform convention above; literal_form_error compares with q^d E^(-xi) E^(theta^T xi),
    its complex conjugate; modulus_error compares absolute values"""
    max_abs_error: float
    literal_form_error: float
    modulus_error: float


def nu_hat_identity_check(E: PointSet, theta) -> NuHatCheck:
    q, d = E.q, E.dim
    M = theta.array if hasattr(theta, 'array') else np.asarray(theta, dtype=np.int64)
    E_hat = fourier_transform(E).values
    nu_hat = transform_function(nu_table(E, M).astype(np.float64), q, d)
    pts = all_points(q, d)
    neg = encode_points(-pts, q)
    # row xi of pts @ M is theta^T xi
    rot = encode_points(pts @ M, q)
    rot_neg = encode_points(-(pts @ M), q)
    scale = q ** d
    consistent = scale * E_hat * E_hat[rot_neg]
    literal = scale * E_hat[neg] * E_hat[rot]
    return NuHatCheck(
        max_abs_error=float(np.max(np.abs(nu_hat - consistent))),
        literal_form_error=float(np.max(np.abs(nu_hat - literal))),
        modulus_error=float(np.max(np.abs(np.abs(nu_hat) - np.abs(literal)))),
    )


# =====================================================
# SPHERICAL ENERGIES
# =====================================================

@dataclass(frozen=True)
class SphericalEnergy:
    """sigma[t] for every t in F_q (t = 0 included), M over t != 0.
    For a mixed pair, sigma holds |sigma_12(t)| and mixed the complex values."""
    sigma: Tuple[float, ...]
    M: float
    mixed: Optional[Tuple[complex, ...]] = None


def spherical_energy(E: PointSet, partner: Optional[PointSet] = None,
                     form: Optional[QuadraticForm] = None) -> SphericalEnergy:
    """Level sets are taken with respect to form (default: dot product)"""
    q, d = E.q, E.dim
    Q = form if form is not None else dot_form(q, d)
    levels = Q.all_norms
    E_hat = fourier_transform(E).values
    if partner is None:
        sigma = np.bincount(levels, weights=np.abs(E_hat) ** 2, minlength=q)
        return SphericalEnergy(tuple(float(s) for s in sigma), float(np.sum(sigma[1:] ** 2)))
    prod = E_hat * np.conj(fourier_transform(partner).values)
    mixed = (np.bincount(levels, weights=prod.real, minlength=q)
             + 1j * np.bincount(levels, weights=prod.imag, minlength=q))
    modulus = np.abs(mixed)
    return SphericalEnergy(tuple(float(s) for s in modulus), float(np.sum(modulus[1:] ** 2)),
                           tuple(complex(m) for m in mixed))


def mixed_cauchy_schwarz(E1: PointSet, E2: PointSet, form: Optional[QuadraticForm] = None,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """|sigma_12(t)| <= sqrt(sigma_1(t) sigma_2(t)) for t != 0"""
    s12 = spherical_energy(E1, E2, form).sigma
    s1 = spherical_energy(E1, form=form).sigma
    s2 = spherical_energy(E2, form=form).sigma
    return all(s12[t] <= math.sqrt(s1[t] * s2[t]) + tolerances.spectral_rel for t in range(1, E1.q))


def mlem_bounds(size: int, q: int) -> Tuple[float, float]:
    """(bound on sigma_E(t), bound on M_E) for a planar set of the given size"""
    return math.sqrt(3) * size ** 1.5 / q ** 3, math.sqrt(3) * size ** 2.5 / q ** 5


@dataclass(frozen=True)
class MlemCheck:
    max_sigma: float
    sigma_bound: float
    M: float
    M_bound: float
    tolerances: Tolerances = DEFAULT_TOLERANCES

    @property
    def holds(self) -> bool:
        slack = self.tolerances.spectral_rel
        return self.max_sigma <= self.sigma_bound + slack and self.M <= self.M_bound + slack


def check_mlem(E: PointSet, form: Optional[QuadraticForm] = None,
               tolerances: Tolerances = DEFAULT_TOLERANCES) -> MlemCheck:
    energy = spherical_energy(E, form=form)
    sigma_bound, M_bound = mlem_bounds(len(E), E.q)
    return MlemCheck(max(energy.sigma[1:]), sigma_bound, energy.M, M_bound, tolerances)


def taylor_bound_check(f: Union[Sequence[float], Dict[object, float]], n: int) -> Tuple[float, float]:
    """sum f^n against |F| (|f|_1/|F|)^n + n(n-1)/2 |f|_inf^(n-2) sum (f - |f|_1/|F|)^2"""
    if n < 2:
        raise BadExponent(f"exponent must be at least 2, got {n}")
    values = np.asarray(list(f.values()) if isinstance(f, dict) else list(f), dtype=np.float64)
    if np.any(values < 0):
        raise NegativeValue("function must be nonnegative")
    if values.size == 0:
        return 0.0, 0.0
    size = values.size
    mean = values.sum() / size
    lhs = float(np.sum(values ** n))
    rhs = float(size * mean ** n + n * (n - 1) / 2 * values.max() ** (n - 2) * np.sum((values - mean) ** 2))
    return lhs, rhs


# =====================================================
# NULL-LINE PRUNING (q = 1 mod 4)
# =====================================================

@dataclass(frozen=True)
class NullPruneReport:
    """Lines of the "+" family are translates of L_+ (fixed n_- coefficient), lines of
    the "-" family translates of L_- (fixed n_+ coefficient)."""
    rich_threshold: float
    wealthy_threshold: float
    wealthy_plus_lines: int
    wealthy_minus_lines: int
    discarded: int
    pruned: PointSet
    all_poor: bool
    rich_family: Optional[str]
    part1: Optional[PointSet]
    part2: Optional[PointSet]


def _line_counts(E: PointSet) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    basis = null_line_basis(E.q)
    plus, minus = basis.coordinates(E.coords())
    # "+" family lines are indexed by the n_- coefficient and vice versa
    return plus, minus, np.bincount(minus, minlength=E.q), np.bincount(plus, minlength=E.q)


def null_coordinate_prune(E: PointSet) -> NullPruneReport:
    size = len(E)
    wealthy = math.sqrt(2 * size)
    plus, minus, plus_lines, minus_lines = _line_counts(E)
    both = (plus_lines[minus] >= wealthy) & (minus_lines[plus] >= wealthy)
    idx = E.indices()
    pruned = PointSet.from_indices(E.q, E.dim, idx[~both])

    kept = len(pruned)
    rich = 2 * math.sqrt(kept)
    p_plus, p_minus, p_plus_lines, p_minus_lines = _line_counts(pruned)
    on_rich_plus = int(p_plus_lines[p_plus_lines >= rich].sum()) if kept else 0
    on_rich_minus = int(p_minus_lines[p_minus_lines >= rich].sum()) if kept else 0

    report = dict(
        rich_threshold=rich, wealthy_threshold=wealthy,
        wealthy_plus_lines=int((plus_lines >= wealthy).sum()),
        wealthy_minus_lines=int((minus_lines >= wealthy).sum()),
        discarded=int(both.sum()), pruned=pruned,
    )
    if on_rich_plus == 0 and on_rich_minus == 0:
        logger.debug(f"null prune: {kept} points, all coordinates poor")
        return NullPruneReport(all_poor=True, rich_family=None, part1=None, part2=None, **report)

    family = '+' if on_rich_plus >= on_rich_minus else '-'
    # whole lines of the rich family go to one part, so no cross difference lies on that null line
    key = p_minus if family == '+' else p_plus
    values, counts = np.unique(key, return_counts=True)
    cum = np.cumsum(counts)
    cut = int(np.searchsorted(cum, kept / 2))
    first_values = values[:cut + 1]
    in_first = np.isin(key, first_values)
    pidx = pruned.indices()
    part1 = PointSet.from_indices(E.q, E.dim, pidx[in_first])
    part2 = PointSet.from_indices(E.q, E.dim, pidx[~in_first])
    logger.debug(f"null prune: rich {family} family, split {len(part1)}/{len(part2)}")
    return NullPruneReport(all_poor=False, rich_family=family, part1=part1, part2=part2, **report)


def null_pair_count(E: PointSet, partner: Optional[PointSet] = None) -> int:
    """#{(u, v) in E x partner : u - v in L_+ ∪ L_-}"""
    F = partner if partner is not None else E
    _, _, e_plus, e_minus = _line_counts(E)
    _, _, f_plus, f_minus = _line_counts(F)
    return int(e_plus @ f_plus + e_minus @ f_minus - len(E.intersection(F)))


# =====================================================
# OUTPUT
# =====================================================

def write_spectral_csv(table: SpectralTable, path: Union[str, Path]):
    with open(path, 'w', newline='', encoding='utf-8') as fh:
        writer = csv.writer(fh)
        writer.writerow(["xi_index", "re", "im"])
        for i, v in enumerate(table.values):
            writer.writerow([i, repr(float(v.real)), repr(float(v.imag))])
    logger.info(f"Wrote spectral table ({len(table.values)} rows) to {path}")
