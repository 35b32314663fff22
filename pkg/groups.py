"""
Isometry groups O(Q) / SO(Q) of a non-degenerate form, built explicitly.

d = 2 is enumerated by brute force over all 2x2 matrices; d >= 3 is the closure
of the reflections in non-null vectors. Elements are kept sorted by their
row-major entries, so element order (and anything derived from it) is canonical.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

import modlinalg
from errors import BudgetExceeded, DegenerateForm, EmptyUnitSphere
from geometry import (QuadraticForm, Vector, all_points, classify_form, encode_points,
                      orthogonal_complement, restrict_form, sphere_size_formula)

logger = logging.getLogger(__name__)

DEFAULT_GROUP_BUDGET = 10_000_000
# matrices per vectorized multiplication block
_BLOCK = 2048


class GroupVariant(Enum):
    FULL = "O"
    SPECIAL = "SO"


@dataclass(frozen=True)
class Isometry:
    matrix: Tuple[Tuple[int, ...], ...]
    q: int

    @classmethod
    def from_array(cls, A: np.ndarray, q: int) -> "Isometry":
        return cls(tuple(tuple(int(v) % q for v in row) for row in np.asarray(A)), q)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    def apply(self, x: Sequence[int]) -> Vector:
        return tuple(int(v) for v in (self.array @ np.asarray(x, dtype=np.int64)) % self.q)

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other"""
        return Isometry.from_array((self.array @ other.array) % self.q, self.q)

    def inverse(self) -> "Isometry":
        inv = modlinalg.inverse_mod(self.array, self.q)
        if inv is None:
            raise ValueError("singular matrix is not an isometry")
        return Isometry.from_array(inv, self.q)

    def transpose(self) -> "Isometry":
        return Isometry.from_array(self.array.T, self.q)

    def det(self) -> int:
        return modlinalg.det_mod(self.array, self.q)


@dataclass(frozen=True)
class RigidMotion:
    """x -> rotation(x) + translation"""
    rotation: Isometry
    translation: Vector

    def apply(self, x: Sequence[int]) -> Vector:
        q = self.rotation.q
        return tuple((a + b) % q for a, b in zip(self.rotation.apply(x), self.translation))

    def compose(self, other: "RigidMotion") -> "RigidMotion":
        return RigidMotion(self.rotation.compose(other.rotation), self.apply(other.translation))

    def inverse(self) -> "RigidMotion":
        inv = self.rotation.inverse()
        q = self.rotation.q
        return RigidMotion(inv, tuple((-v) % q for v in inv.apply(self.translation)))


def _matrix_keys(mats: np.ndarray, q: int) -> np.ndarray:
    """Integer keys whose numeric order is the lexicographic order of row-major entries"""
    n, d, _ = mats.shape
    flat = mats.reshape(n, d * d)
    weights = q ** np.arange(d * d - 1, -1, -1, dtype=np.int64)
    return flat @ weights


class IsometryGroup:
    """An explicit group of isometries of a form, elements sorted canonically"""

    def __init__(self, form: QuadraticForm, variant: GroupVariant, matrices: np.ndarray):
        self.form = form
        self.variant = variant
        mats = np.asarray(matrices, dtype=np.int64).reshape(-1, form.dim, form.dim) % form.q
        keys = _matrix_keys(mats, form.q)
        order = np.argsort(keys, kind='stable')
        self.matrices = mats[order]
        self.keys = keys[order]
        self.matrices.setflags(write=False)
        self.keys.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.keys)

    def __len__(self) -> int:
        return self.order

    def __iter__(self) -> Iterator[Isometry]:
        for M in self.matrices:
            yield Isometry.from_array(M, self.form.q)

    def element(self, i: int) -> Isometry:
        return Isometry.from_array(self.matrices[i], self.form.q)

    def index_of(self, matrix) -> Optional[int]:
        key = _matrix_keys(np.asarray(matrix, dtype=np.int64).reshape(1, self.form.dim, self.form.dim) % self.form.q,
                           self.form.q)[0]
        i = int(np.searchsorted(self.keys, key))
        if i < self.order and self.keys[i] == key:
            return i
        return None

    def __contains__(self, g) -> bool:
        matrix = g.array if isinstance(g, Isometry) else g
        return self.index_of(matrix) is not None

    @cached_property
    def point_action(self) -> np.ndarray:
        """table[g, x] = index of g(x), shape (|G|, q^d)"""
        q, d = self.form.q, self.form.dim
        pts = all_points(q, d)
        table = np.empty((self.order, len(pts)), dtype=np.int32)
        step = max(1, 2_000_000 // (len(pts) * d))
        for start in range(0, self.order, step):
            block = self.matrices[start:start + step]
            images = np.einsum('nij,pj->npi', block, pts) % q
            table[start:start + step] = encode_points(images, q)
        table.setflags(write=False)
        return table

    def subgroup(self, mask: np.ndarray) -> "IsometryGroup":
        return IsometryGroup(self.form, self.variant, self.matrices[np.asarray(mask, dtype=bool)])

    def __repr__(self) -> str:
        return f"IsometryGroup({self.variant.value}, q={self.form.q}, d={self.form.dim}, order={self.order})"


# =====================================================
# CONSTRUCTION
# =====================================================

def group_order_recursion(Q: QuadraticForm) -> int:
    """|O(Q)| = |S_1| * |O(Q restricted to x^perp)| for any x with Q(x) = 1, |O_1| = 2"""
    fc = classify_form(Q)
    if Q.dim == 1:
        return 2
    unit = np.flatnonzero(Q.all_norms == 1)
    if unit.size == 0:
        raise EmptyUnitSphere(f"{Q} has no vector of norm 1")
    x = all_points(Q.q, Q.dim)[unit[0]]
    perp = restrict_form(Q, orthogonal_complement(Q, [x]))
    return sphere_size_formula(fc, 1) * group_order_recursion(perp)


def reflection_generators(Q: QuadraticForm) -> np.ndarray:
    """Reflections x -> x - 2 <x, v> / Q(v) v, one per non-null projective point v"""
    q, d = Q.q, Q.dim
    pts = all_points(q, d)
    nonzero = pts != 0
    first = pts[np.arange(len(pts)), np.argmax(nonzero, axis=1)]
    reps = np.flatnonzero(nonzero.any(axis=1) & (first == 1) & (Q.all_norms != 0))
    V = pts[reps]
    BV = (V @ Q.matrix) % q
    coeff = np.array([(2 * Q.field.inv(int(n))) % q for n in Q.all_norms[reps]], dtype=np.int64)
    eye = np.eye(d, dtype=np.int64)
    mats = (eye[None] - coeff[:, None, None] * np.einsum('ri,rj->rij', V, BV)) % q
    return mats


def brute_force_orthogonal_group(Q: QuadraticForm) -> np.ndarray:
    """Every d x d matrix with M^T B M = B; only sensible for d <= 2"""
    q, d = Q.q, Q.dim
    candidates = all_points(q, d * d).reshape(-1, d, d)
    lhs = np.einsum('nki,kl,nlj->nij', candidates, Q.matrix, candidates) % q
    keep = np.all(lhs == Q.matrix[None], axis=(1, 2))
    return candidates[keep]


def reflection_closure(Q: QuadraticForm, budget: int = DEFAULT_GROUP_BUDGET) -> np.ndarray:
    q, d = Q.q, Q.dim
    gens = reflection_generators(Q)
    frontier = np.eye(d, dtype=np.int64)[None]
    known = _matrix_keys(frontier, q)
    layers = [frontier]
    while len(frontier):
        fresh_keys = []
        fresh_mats = []
        for start in range(0, len(frontier), _BLOCK):
            block = frontier[start:start + _BLOCK]
            prods = (np.einsum('fij,rjk->frik', block, gens) % q).reshape(-1, d, d)
            keys = _matrix_keys(prods, q)
            keys, first = np.unique(keys, return_index=True)
            new = ~np.isin(keys, known)
            fresh_keys.append(keys[new])
            fresh_mats.append(prods[first[new]])
        keys = np.concatenate(fresh_keys)
        keys, first = np.unique(keys, return_index=True)
        frontier = np.concatenate(fresh_mats)[first]
        known = np.concatenate([known, keys])
        layers.append(frontier)
        if len(known) > budget:
            raise BudgetExceeded(f"reflection closure passed {budget} elements", len(known), budget)
    return np.concatenate(layers)


@lru_cache(maxsize=32)
def orthogonal_group(Q: QuadraticForm, variant: GroupVariant = GroupVariant.FULL,
                     budget: int = DEFAULT_GROUP_BUDGET) -> IsometryGroup:
    """Explicit O(Q) or SO(Q); raises BudgetExceeded before enumerating a group that is too large"""
    if Q.is_degenerate():
        raise DegenerateForm(f"{Q} is degenerate")
    q, d = Q.q, Q.dim
    estimate = group_order_recursion(Q)
    if estimate > budget:
        raise BudgetExceeded(f"|O(Q)| = {estimate} exceeds budget {budget}", estimate, budget)
    if q ** (d * d) >= 2 ** 63:
        raise BudgetExceeded(f"matrix keys for q={q}, d={d} do not fit in 64 bits", estimate, budget)

    if d <= 2 and q ** (d * d) <= 2_000_000:
        mats = brute_force_orthogonal_group(Q)
    else:
        mats = reflection_closure(Q, budget)
    if variant == GroupVariant.SPECIAL:
        dets = np.array([modlinalg.det_mod(M, q) for M in mats])
        mats = mats[dets == 1]
    G = IsometryGroup(Q, variant, mats)
    logger.info(f"Built {G!r}")
    return G


# =====================================================
# ACTIONS
# =====================================================

def _tuple_indices(points: Sequence[Sequence[int]], q: int) -> np.ndarray:
    if len(points) == 0:
        return np.zeros(0, dtype=np.int64)
    return encode_points(np.array(points, dtype=np.int64).reshape(len(points), -1), q)


def stabilizer(G: IsometryGroup, points: Sequence[Sequence[int]]) -> IsometryGroup:
    """Elements fixing every listed point"""
    idx = _tuple_indices(points, G.form.q)
    if len(idx) == 0:
        return G
    mask = np.all(G.point_action[:, idx] == idx[None, :], axis=1)
    return G.subgroup(mask)


def orbit(G: IsometryGroup, points: Sequence[Sequence[int]]) -> FrozenSet[Tuple[Vector, ...]]:
    """Orbit of a tuple of points under simultaneous action"""
    q, d = G.form.q, G.form.dim
    idx = _tuple_indices(points, q)
    images = np.unique(G.point_action[:, idx], axis=0)
    pts = all_points(q, d)
    return frozenset(tuple(tuple(int(v) for v in pts[i]) for i in row) for row in images)


def verify_group_axioms(G: IsometryGroup, full_closure_limit: int = 2000) -> bool:
    """Identity, form preservation, inverses and closure"""
    Q = G.form
    q, d = Q.q, Q.dim
    if G.index_of(np.eye(d, dtype=np.int64)) is None:
        logger.error(f"{G!r} lacks the identity")
        return False
    lhs = np.einsum('nki,kl,nlj->nij', G.matrices, Q.matrix, G.matrices) % q
    if not np.all(lhs == Q.matrix[None]):
        logger.error(f"{G!r} contains a non-isometry")
        return False
    B_inv = modlinalg.inverse_mod(Q.matrix, q)
    # g^{-1} = B^{-1} g^T B for an isometry
    inverses = np.einsum('ij,njk,kl->nil', B_inv, np.transpose(G.matrices, (0, 2, 1)), Q.matrix) % q
    if not np.all(np.isin(_matrix_keys(inverses, q), G.keys)):
        logger.error(f"{G!r} is not closed under inverses")
        return False
    right = G.matrices if G.order <= full_closure_limit else G.matrices[:full_closure_limit // 10 or 1]
    for start in range(0, G.order, 256):
        block = G.matrices[start:start + 256]
        prods = (np.einsum('aij,bjk->abik', block, right) % q).reshape(-1, d, d)
        if not np.all(np.isin(_matrix_keys(prods, q), G.keys)):
            logger.error(f"{G!r} is not closed under composition")
            return False
    return True
