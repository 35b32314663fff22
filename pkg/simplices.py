"""
Simplices in F_q^d: ordered distance matrices, multiplicities, congruence and
similarity class counts, and the exact counting identities tying classes to
incidences of rigid motions.

All tuple enumeration runs over E^(k+1) in lexicographic order of member
positions, in fixed-size numpy chunks, so results never depend on chunking.
"""
import csv
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

import modlinalg
from errors import NotOnSphere
from geometry import (PointSet, QuadraticForm, Vector, all_points, encode_points, form_of_class,
                      orthogonal_complement, radical_split, restrict_form, sphere_points)
from groups import (GroupVariant, IsometryGroup, group_order_recursion, orthogonal_group)

logger = logging.getLogger(__name__)

_CHUNK = 1 << 18
_INT64_KEY_LIMIT = 1 << 63


class CongruenceMode(Enum):
    DISTANCE_MATRIX_FAST = "fast"
    EXACT_ORBIT = "exact"
    EXACT_ORBIT_PINNED = "pinned"


class ScalingMode(Enum):
    SQUARES_ONLY = "squares"
    ALL_SCALARS = "all"


def vertex_pairs(k: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(k + 1) for j in range(i + 1, k + 1)]


@dataclass(frozen=True)
class DistanceMatrix:
    """Upper triangle d_ij = Q(x_i - x_j), i < j, in row-major pair order"""
    q: int
    k: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != len(vertex_pairs(self.k)):
            raise ValueError(f"a {self.k}-simplex has {len(vertex_pairs(self.k))} distances, got {len(self.entries)}")
        object.__setattr__(self, 'entries', tuple(int(e) % self.q for e in self.entries))

    def entry(self, i: int, j: int) -> int:
        if i == j:
            return 0
        i, j = min(i, j), max(i, j)
        return self.entries[vertex_pairs(self.k).index((i, j))]

    def full(self) -> np.ndarray:
        M = np.zeros((self.k + 1, self.k + 1), dtype=np.int64)
        for (i, j), e in zip(vertex_pairs(self.k), self.entries):
            M[i, j] = M[j, i] = e
        return M

    def key(self) -> int:
        key = 0
        for e in self.entries:
            key = key * self.q + e
        return key

    @classmethod
    def from_key(cls, key: int, q: int, k: int) -> "DistanceMatrix":
        n = len(vertex_pairs(k))
        entries = []
        for _ in range(n):
            entries.append(key % q)
            key //= q
        return cls(q, k, tuple(reversed(entries)))


@dataclass(frozen=True)
class ClassRecord:
    class_id: int
    representative: Tuple[Vector, ...]
    distances: DistanceMatrix
    mu: int
    stabilizer_size: Optional[int]
    degenerate: bool


@dataclass(frozen=True)
class ClassCount:
    mode: CongruenceMode
    k: int
    total: int
    degenerate_classes: int
    nondegenerate_classes: int
    inventory: Tuple[ClassRecord, ...] = ()


def distance_matrix(Q: QuadraticForm, simplex: Sequence[Sequence[int]]) -> DistanceMatrix:
    pts = [np.asarray(p, dtype=np.int64) for p in simplex]
    k = len(pts) - 1
    return DistanceMatrix(Q.q, k, tuple(Q.norm(pts[i] - pts[j]) for i, j in vertex_pairs(k)))


# =====================================================
# VECTORIZED KERNELS
# =====================================================

def _tuple_chunks(n: int, m: int, chunk: int = _CHUNK):
    """(start, array) blocks of all m-tuples over range(n), lexicographic"""
    total = n ** m
    powers = [n ** (m - 1 - j) for j in range(m)]
    for start in range(0, total, chunk):
        ids = np.arange(start, min(total, start + chunk), dtype=np.int64)
        T = np.empty((len(ids), m), dtype=np.int64)
        for j in range(m):
            T[:, j] = (ids // powers[j]) % n
        yield start, T


def _pairwise_norms(Q: QuadraticForm, X: np.ndarray) -> np.ndarray:
    return Q.norms(X[:, None, :] - X[None, :, :])


def _key_dtype(radix: int, width: int):
    """int64 while radix^width fits, Python ints (object arrays) beyond that"""
    return np.int64 if radix ** width < _INT64_KEY_LIMIT else object


def _distance_keys(D: np.ndarray, T: np.ndarray, q: int, k: int) -> np.ndarray:
    dtype = _key_dtype(q, len(vertex_pairs(k)))
    keys = np.zeros(len(T), dtype=dtype)
    for i, j in vertex_pairs(k):
        keys = keys * q + D[T[:, i], T[:, j]].astype(dtype)
    return keys


def _nondegenerate_mask(X: np.ndarray, T: np.ndarray, q: int, k: int) -> np.ndarray:
    """Tuples whose differences x_i - x_0 are linearly independent"""
    d = X.shape[1]
    if k > d:
        return np.zeros(len(T), dtype=bool)
    if k == 0:
        return np.ones(len(T), dtype=bool)
    diffs = (X[T[:, 1:]] - X[T[:, :1]]) % q
    mask = np.zeros(len(T), dtype=bool)
    perms = list(itertools.permutations(range(k)))
    signs = [_perm_sign(p) for p in perms]
    for cols in itertools.combinations(range(d), k):
        sub = diffs[:, :, list(cols)]
        minor = np.zeros(len(T), dtype=np.int64)
        for p, s in zip(perms, signs):
            term = np.ones(len(T), dtype=np.int64)
            for i in range(k):
                term = (term * sub[:, i, p[i]]) % q
            minor += s * term
        mask |= (minor % q) != 0
    return mask


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _merge_labels(parts: List[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]):
    """Combine per-chunk (labels, counts, first tuple id, nondegenerate flag) into
    per-class (labels, counts, first tuple ids, nondegenerate flags)"""
    labels = np.concatenate([p[0] for p in parts])
    chunk_counts = np.concatenate([p[1] for p in parts])
    first = np.concatenate([p[2] for p in parts])
    nondeg = np.concatenate([p[3] for p in parts])
    uniq, inverse = np.unique(labels, return_inverse=True)
    inverse = inverse.ravel()
    counts = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(counts, inverse, chunk_counts)
    first_ids = np.full(len(uniq), np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(first_ids, inverse, first)
    flags = np.zeros(len(uniq), dtype=bool)
    np.logical_or.at(flags, inverse, nondeg)
    return uniq, counts, first_ids, flags


def _decode_tuple(tuple_id: int, n: int, m: int) -> List[int]:
    return [(tuple_id // n ** (m - 1 - j)) % n for j in range(m)]


def _resolve_group(Q: QuadraticForm, variant: GroupVariant, group: Optional[IsometryGroup]) -> IsometryGroup:
    if group is not None:
        return group
    return orthogonal_group(Q, variant)


# =====================================================
# CLASS COUNTS
# =====================================================

def count_congruence_classes(E: PointSet, k: int, Q: QuadraticForm,
                             mode: CongruenceMode = CongruenceMode.DISTANCE_MATRIX_FAST,
                             variant: GroupVariant = GroupVariant.FULL,
                             group: Optional[IsometryGroup] = None,
                             with_inventory: bool = False) -> ClassCount:
    """Number of classes of (k+1)-tuples of E.

    fast: distinct ordered distance matrices; a matrix counts as non-degenerate when
    some non-degenerate tuple realizes it. exact: orbits under rigid motions.
    pinned: orbits under the isometry group alone.
    """
    q = Q.q
    X = E.coords()
    n = len(X)
    m = k + 1
    if n == 0:
        return ClassCount(mode, k, 0, 0, 0)

    parts = []
    if mode == CongruenceMode.DISTANCE_MATRIX_FAST:
        D = _pairwise_norms(Q, X)
        for start, T in _tuple_chunks(n, m):
            parts.append(_chunk_labels(_distance_keys(D, T, q, k), start, _nondegenerate_mask(X, T, q, k)))
    else:
        G = _resolve_group(Q, variant, group)
        N = q ** Q.dim
        idx = E.indices()
        width = k if mode == CongruenceMode.EXACT_ORBIT else m
        key_dtype = _key_dtype(N, width)
        chunk = max(1, 4_000_000 // (G.order * max(1, width)))
        for start, T in _tuple_chunks(n, m, chunk):
            if mode == CongruenceMode.EXACT_ORBIT:
                # translate x_0 to the origin; the lexicographically least image then starts at index 0
                P = encode_points(X[T[:, 1:]] - X[T[:, :1]], q)
            else:
                P = idx[T]
            images = G.point_action[:, P].astype(np.int64)
            keys = np.zeros(images.shape[:2], dtype=key_dtype)
            for j in range(width):
                keys = keys * N + images[:, :, j].astype(key_dtype)
            parts.append(_chunk_labels(keys.min(axis=0), start, _nondegenerate_mask(X, T, q, k)))

    uniq, counts, first_ids, flags = _merge_labels(parts)
    nondeg_classes = int(flags.sum())
    inventory: Tuple[ClassRecord, ...] = ()
    if with_inventory:
        inventory = tuple(_class_records(mode, E, Q, k, uniq, counts, first_ids, flags,
                                         None if mode == CongruenceMode.DISTANCE_MATRIX_FAST
                                         else _resolve_group(Q, variant, group)))
    result = ClassCount(mode, k, len(uniq), len(uniq) - nondeg_classes, nondeg_classes, inventory)
    logger.debug(f"{mode.value} count over {n} points, k={k}: {result.total} classes")
    return result


def _chunk_labels(labels: np.ndarray, start: int, nondeg: np.ndarray):
    uniq, first, inverse, counts = np.unique(labels, return_index=True, return_inverse=True, return_counts=True)
    flags = np.zeros(len(uniq), dtype=bool)
    np.logical_or.at(flags, inverse.ravel(), nondeg)
    return uniq, counts.astype(np.int64), first.astype(np.int64) + start, flags


def _class_records(mode: CongruenceMode, E: PointSet, Q: QuadraticForm, k: int,
                   labels: np.ndarray, counts: np.ndarray, first_ids: np.ndarray, flags: np.ndarray,
                   G: Optional[IsometryGroup]) -> List[ClassRecord]:
    q, d = Q.q, Q.dim
    N = q ** d
    pts = all_points(q, d)
    members = E.points()
    records = []
    for class_id, (label, mu, first, nondeg) in enumerate(zip(labels, counts, first_ids, flags)):
        if mode == CongruenceMode.DISTANCE_MATRIX_FAST:
            rep = tuple(members[i] for i in _decode_tuple(int(first), len(members), k + 1))
            stab = None
        else:
            width = k if mode == CongruenceMode.EXACT_ORBIT else k + 1
            rep_idx = _decode_tuple(int(label), N, width)
            if mode == CongruenceMode.EXACT_ORBIT:
                rep_idx = [0] + rep_idx
            rep = tuple(tuple(int(v) for v in pts[i]) for i in rep_idx)
            if mode == CongruenceMode.EXACT_ORBIT:
                stab = class_stabilizer_size(Q, rep, group=G)
            else:
                fixed = np.asarray(rep_idx, dtype=np.int64)
                stab = int(np.all(G.point_action[:, fixed] == fixed[None, :], axis=1).sum())
        records.append(ClassRecord(class_id, rep, distance_matrix(Q, rep), int(mu), stab, not bool(nondeg)))
    return records


def class_stabilizer_size(Q: QuadraticForm, simplex: Sequence[Sequence[int]],
                          variant: GroupVariant = GroupVariant.FULL,
                          group: Optional[IsometryGroup] = None) -> int:
    """Order of the isometry stabilizer of the pinned simplex (x_i - x_0)"""
    G = _resolve_group(Q, variant, group)
    base = np.asarray(simplex[0], dtype=np.int64)
    diffs = [np.asarray(p, dtype=np.int64) - base for p in simplex[1:]]
    if not diffs:
        return G.order
    idx = encode_points(np.array(diffs), Q.q)
    return int(np.all(G.point_action[:, idx] == idx[None, :], axis=1).sum())


@dataclass(frozen=True)
class GoodSimplexCheck:
    good: bool
    stabilizer_size: int
    complement_group_order: Optional[int]

    @property
    def holds(self) -> bool:
        return not self.good or self.stabilizer_size == self.complement_group_order


def good_simplex_stabilizer_check(Q: QuadraticForm, simplex: Sequence[Sequence[int]],
                                  group: Optional[IsometryGroup] = None) -> GoodSimplexCheck:
    """For a simplex whose span V meets V^perp trivially, its stabilizer is O(Q on V^perp)"""
    base = np.asarray(simplex[0], dtype=np.int64)
    diffs = np.array([np.asarray(p, dtype=np.int64) - base for p in simplex[1:]], dtype=np.int64) % Q.q
    stab = class_stabilizer_size(Q, simplex, group=group)
    if len(diffs) == 0 or modlinalg.rank_mod(diffs, Q.q) < len(diffs):
        return GoodSimplexCheck(False, stab, None)
    null_rank, _ = radical_split(Q, diffs)
    if null_rank:
        return GoodSimplexCheck(False, stab, None)
    perp = orthogonal_complement(Q, diffs)
    order = 1 if len(perp) == 0 else group_order_recursion(restrict_form(Q, perp))
    return GoodSimplexCheck(True, stab, order)


# =====================================================
# MULTIPLICITIES
# =====================================================

def mu_count(E: PointSet, target: DistanceMatrix, Q: QuadraticForm) -> int:
    """Number of (k+1)-tuples of E with ordered distance matrix target (backtracking)"""
    X = E.coords()
    if len(X) == 0:
        return 0
    D = _pairwise_norms(Q, X)
    M = target.full()
    m = target.k + 1

    def extend(chosen: List[int]) -> int:
        j = len(chosen)
        mask = np.ones(len(X), dtype=bool)
        for i, c in enumerate(chosen):
            mask &= D[c] == M[i, j]
        if j == m - 1:
            return int(mask.sum())
        return sum(extend(chosen + [int(c)]) for c in np.flatnonzero(mask))

    return extend([])


def _as_matrix(theta) -> np.ndarray:
    return theta.array if hasattr(theta, 'array') else np.asarray(theta, dtype=np.int64)


def nu_count(E: PointSet, theta, z: Sequence[int], r: int = 1) -> int:
    """#{(u, v) in E^2 : u - r theta(v) = z}"""
    q = E.q
    V = E.coords()
    images = (np.asarray(z, dtype=np.int64) + r * (V @ _as_matrix(theta).T)) % q
    return int(E.membership[encode_points(images, q)].sum())


def nu_table(E: PointSet, theta, r: int = 1, partner: Optional[PointSet] = None) -> np.ndarray:
    """nu(z) for every z, indexed by point index; u ranges over E, v over partner (default E)"""
    q = E.q
    U = E.coords()
    V = (partner if partner is not None else E).coords()
    TV = (r * (V @ _as_matrix(theta).T)) % q
    Z = encode_points(U[:, None, :] - TV[None, :, :], q).ravel()
    return np.bincount(Z, minlength=q ** E.dim)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def verify_counting_identity(E: PointSet, k: int, Q: QuadraticForm,
                             variant: GroupVariant = GroupVariant.FULL,
                             group: Optional[IsometryGroup] = None) -> IdentityCheck:
    """sum over classes s(D) mu(D)^2 against sum over (theta, z) nu(theta, z)^(k+1)"""
    G = _resolve_group(Q, variant, group)
    cc = count_congruence_classes(E, k, Q, CongruenceMode.EXACT_ORBIT, group=G, with_inventory=True)
    lhs = sum(rec.stabilizer_size * rec.mu ** 2 for rec in cc.inventory)
    rhs = 0
    for M in G.matrices:
        nu = nu_table(E, M).astype(np.int64)
        rhs += int(np.sum(nu ** (k + 1)))
    logger.debug(f"counting identity k={k} |E|={len(E)}: {lhs} vs {rhs}")
    return IdentityCheck(int(lhs), int(rhs))


# =====================================================
# SIMILARITY AND DERIVED COUNTS
# =====================================================

def _scalars(q: int, mode: ScalingMode) -> List[int]:
    if mode == ScalingMode.SQUARES_ONLY:
        return sorted({(x * x) % q for x in range(1, q)})
    return list(range(1, q))


def similarity_canonical(dm: DistanceMatrix, mode: ScalingMode = ScalingMode.SQUARES_ONLY) -> Tuple[int, ...]:
    return min(tuple((s * e) % dm.q for e in dm.entries) for s in _scalars(dm.q, mode))


def similarity_classes(matrices, mode: ScalingMode = ScalingMode.SQUARES_ONLY) -> Set[Tuple[int, ...]]:
    return {similarity_canonical(dm, mode) for dm in matrices}


def distinct_distance_matrices(E: PointSet, k: int, Q: QuadraticForm) -> List[DistanceMatrix]:
    X = E.coords()
    if len(X) == 0:
        return []
    D = _pairwise_norms(Q, X)
    keys = np.unique(np.concatenate([np.unique(_distance_keys(D, T, Q.q, k))
                                     for _, T in _tuple_chunks(len(X), k + 1)]))
    return [DistanceMatrix.from_key(int(key), Q.q, k) for key in keys]


def count_similarity_classes(E: PointSet, k: int, Q: QuadraticForm,
                             mode: ScalingMode = ScalingMode.SQUARES_ONLY) -> int:
    """Distance matrices modulo D ~ sD (s a nonzero square, or any nonzero scalar)"""
    return len(similarity_classes(distinct_distance_matrices(E, k, Q), mode))


def count_unordered_classes(E: PointSet, k: int, Q: QuadraticForm) -> int:
    """Distance matrices modulo relabelling of the vertices"""
    perms = list(itertools.permutations(range(k + 1)))
    canon = set()
    for dm in distinct_distance_matrices(E, k, Q):
        M = dm.full()
        canon.add(min(tuple(int(M[p[i], p[j]]) for i, j in vertex_pairs(k)) for p in perms))
    return len(canon)


@dataclass(frozen=True)
class DegenerateBoundCheck:
    degenerate_classes: int
    bound: int

    @property
    def holds(self) -> bool:
        return self.degenerate_classes <= self.bound


def degenerate_class_bound(Q: QuadraticForm, k: int) -> DegenerateBoundCheck:
    """Degenerate ordered-distance classes of F_q^d against 2k times the largest
    class count of k-simplices in a (k-1)-dimensional non-degenerate space"""
    q = Q.q
    full = PointSet.full(q, Q.dim)
    lhs = count_congruence_classes(full, k, Q).degenerate_classes
    if k <= 1:
        return DegenerateBoundCheck(lhs, 2 * k)
    best = 0
    for square in (True, False):
        low = form_of_class(q, k - 1, square)
        best = max(best, count_congruence_classes(PointSet.full(q, k - 1), k, low).total)
    return DegenerateBoundCheck(lhs, 2 * k * best)


def similarity_identity_diagnostic(E: PointSet, Q: QuadraticForm) -> Tuple[int, int]:
    """Both sides of the triangle similarity comparison in the plane.

    Left: sum over similarity classes (all nonzero scalars) of the squared number of
    triangles in E in the class. Right: sum over r != 0, rotations theta and z of
    nu(r, theta, z)^3, where z on a null line (z != 0) only contributes for theta = I.
    Reported, not asserted.
    """
    k = 2
    q = Q.q
    cc = count_congruence_classes(E, k, Q, with_inventory=True)
    weights: Dict[Tuple[int, ...], int] = {}
    for rec in cc.inventory:
        canon = similarity_canonical(rec.distances, ScalingMode.ALL_SCALARS)
        weights[canon] = weights.get(canon, 0) + rec.mu
    lhs = sum(w ** 2 for w in weights.values())

    null_star = (Q.all_norms == 0)
    null_star[0] = False
    G = orthogonal_group(Q, GroupVariant.SPECIAL)
    identity = np.eye(Q.dim, dtype=np.int64)
    rhs = 0
    for r in range(1, q):
        for M in G.matrices:
            nu = nu_table(E, M, r).astype(np.int64)
            rhs += int(np.sum(nu[~null_star] ** 3))
        nu = nu_table(E, identity, r).astype(np.int64)
        rhs += int(np.sum(nu[null_star] ** 3))
    return int(lhs), int(rhs)


# =====================================================
# DOT-LEVEL DECOMPOSITION ON A SPHERE
# =====================================================

@dataclass(frozen=True)
class DotLevelReport:
    radius: int
    nu_by_level: Tuple[int, ...]
    sum_f_squared: int
    S: int
    T: int
    R: int
    T_formula: int
    R_formula: int
    nu_square_sum: int
    nu_bound: float

    @property
    def holds(self) -> bool:
        return (self.S + self.T + self.R == self.sum_f_squared
                and self.T == self.T_formula and self.R == self.R_formula
                and self.nu_square_sum <= self.nu_bound)


def dot_level_decomposition(E: PointSet, Q: QuadraticForm, radius: Optional[int] = None,
                            group: Optional[IsometryGroup] = None) -> DotLevelReport:
    """Split sum_g f(g)^2, f(g) = #{z in E : g z in E}, into S + T + R.

    T collects pairs x = z, R pairs x = -z, S the rest; T and R are checked against
    |O|/|S| |E|^2 and |O|/|S| |E ∩ -E|^2.
    """
    q, d = Q.q, Q.dim
    X = E.coords()
    norms = Q.norms(X)
    if radius is None:
        if len(X) == 0:
            raise NotOnSphere("empty set with no radius given")
        radius = int(norms[0])
    radius %= q
    if radius == 0 or np.any(norms != radius):
        raise NotOnSphere(f"points do not all have norm {radius} != 0")

    G = _resolve_group(Q, GroupVariant.FULL, group)
    sphere_size = len(sphere_points(Q, radius))
    n = len(X)

    AX = (X @ Q.matrix.T) % q
    dots = ((X @ AX.T) % q).ravel()
    nu = np.bincount(dots, minlength=q).astype(np.int64)

    idx = E.indices()
    in_e = E.membership[G.point_action[:, idx]]
    f = in_e.sum(axis=1).astype(np.int64)

    sym = E.intersection(E.negation())
    neg_of = np.full(n, -1, dtype=np.int64)
    member_neg = encode_points(-X, q)
    pos = np.searchsorted(idx, member_neg)
    if n:
        has_neg = idx[np.minimum(pos, n - 1)] == member_neg
    else:
        has_neg = np.zeros(0, dtype=bool)
    neg_of[has_neg] = pos[has_neg]

    W = ~np.eye(n, dtype=bool)
    rows = np.flatnonzero(has_neg)
    W[rows, neg_of[rows]] = False
    S = int(np.einsum('gi,ij,gj->', in_e.astype(np.int64), W.astype(np.int64), in_e.astype(np.int64)))
    T = int(f.sum())
    sym_idx = sym.indices()
    R = int(sym.membership[G.point_action[:, sym_idx]].sum())

    ratio = G.order // sphere_size
    report = DotLevelReport(
        radius=radius,
        nu_by_level=tuple(int(v) for v in nu),
        sum_f_squared=int((f ** 2).sum()),
        S=S, T=T, R=R,
        T_formula=ratio * n ** 2,
        R_formula=ratio * len(sym) ** 2,
        nu_square_sum=int((nu ** 2).sum()),
        nu_bound=n ** 4 / q + 2 * n ** 2 * q ** (d - 1),
    )
    logger.debug(f"dot-level decomposition |E|={n}: S={S} T={T} R={R}")
    return report


# =====================================================
# OUTPUT
# =====================================================

INVENTORY_HEADER = ["class_id", "representative_entries", "mu", "stabilizer_size", "degenerate"]


def write_class_inventory(cc: ClassCount, path: Union[str, Path]):
    with open(path, 'w', newline='', encoding='utf-8') as fh:
        writer = csv.writer(fh)
        writer.writerow(INVENTORY_HEADER)
        for rec in cc.inventory:
            writer.writerow([
                rec.class_id,
                " ".join(str(e) for e in rec.distances.entries),
                rec.mu,
                "" if rec.stabilizer_size is None else rec.stabilizer_size,
                str(rec.degenerate).lower(),
            ])
    logger.info(f"Wrote {len(cc.inventory)} classes to {path}")
