"""
Quadratic spaces over F_q: forms, their isometry classes, spheres, point sets
and null (isotropic) structure.

Points of F_q^d are addressed by their base-q little-endian index
sum(x_i * q**i); every search in this module visits candidates in that order.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

import modlinalg
from errors import (DegenerateForm, DependentBasis, InfeasibleCount, NoNullVector,
                    NotSymmetric, SingularGram, WrongResidueClass)
from gf import PrimeField, make_field

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


# =====================================================
# POINT INDEXING
# =====================================================

@lru_cache(maxsize=32)
def all_points(q: int, d: int) -> np.ndarray:
    """Coordinates of every point of F_q^d, row i is the point with index i"""
    idx = np.arange(q ** d, dtype=np.int64)
    coords = np.empty((q ** d, d), dtype=np.int64)
    for i in range(d):
        coords[:, i] = (idx // q ** i) % q
    coords.setflags(write=False)
    return coords


def encode_points(coords: np.ndarray, q: int) -> np.ndarray:
    """Indices of the rows of coords (last axis is the coordinate axis)"""
    coords = np.asarray(coords, dtype=np.int64) % q
    weights = q ** np.arange(coords.shape[-1], dtype=np.int64)
    return coords @ weights


def point_index(point: Sequence[int], q: int) -> int:
    return int(sum((int(x) % q) * q ** i for i, x in enumerate(point)))


def index_point(index: int, q: int, d: int) -> Vector:
    return tuple((index // q ** i) % q for i in range(d))


# =====================================================
# QUADRATIC FORMS
# =====================================================

@dataclass(frozen=True)
class QuadraticForm:
    """Q(x) = x^T B x with B symmetric; <x, y> = x^T B y"""
    field: PrimeField
    gram: Tuple[Tuple[int, ...], ...]

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def dim(self) -> int:
        return len(self.gram)

    @cached_property
    def matrix(self) -> np.ndarray:
        B = np.array(self.gram, dtype=np.int64).reshape(self.dim, self.dim)
        B.setflags(write=False)
        return B

    def norm(self, x: Sequence[int]) -> int:
        v = np.asarray(x, dtype=np.int64)
        return int(v @ self.matrix @ v) % self.q

    def inner(self, x: Sequence[int], y: Sequence[int]) -> int:
        return int(np.asarray(x, dtype=np.int64) @ self.matrix @ np.asarray(y, dtype=np.int64)) % self.q

    def norms(self, coords: np.ndarray) -> np.ndarray:
        """Q of every row (last axis is the coordinate axis)"""
        X = np.asarray(coords, dtype=np.int64) % self.q
        return np.einsum('...i,ij,...j->...', X, self.matrix, X) % self.q

    def inners(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64) % self.q
        Y = np.asarray(Y, dtype=np.int64) % self.q
        return np.einsum('...i,ij,...j->...', X, self.matrix, Y) % self.q

    @cached_property
    def all_norms(self) -> np.ndarray:
        """Q(x) for every point, by index"""
        values = self.norms(all_points(self.q, self.dim))
        values.setflags(write=False)
        return values

    @cached_property
    def determinant(self) -> int:
        if self.dim == 0:
            return 1
        return modlinalg.det_mod(self.matrix, self.q)

    def is_degenerate(self) -> bool:
        return self.determinant == 0

    def __str__(self) -> str:
        return f"QuadraticForm(q={self.q}, gram={[list(r) for r in self.gram]})"


def make_form(field: PrimeField, gram: Sequence[Sequence[int]]) -> QuadraticForm:
    """Validated form constructor; entries are reduced mod q"""
    rows = [list(r) for r in gram]
    d = len(rows)
    if d == 0 or any(len(r) != d for r in rows):
        raise NotSymmetric(f"Gram matrix must be square and non-empty, got {rows}")
    reduced = tuple(tuple(int(v) % field.q for v in r) for r in rows)
    for i in range(d):
        for j in range(i + 1, d):
            if reduced[i][j] != reduced[j][i]:
                raise NotSymmetric(f"B[{i}][{j}] != B[{j}][{i}]")
    return QuadraticForm(field, reduced)


def dot_form(q: int, d: int) -> QuadraticForm:
    return make_form(make_field(q), np.eye(d, dtype=np.int64).tolist())


def hyperbolic_form(q: int) -> QuadraticForm:
    """Gram [[0, 1/2], [1/2, 0]], i.e. Q(x) = x1 * x2"""
    field = make_field(q)
    half = field.inv(2)
    return make_form(field, [[0, half], [half, 0]])


def minkowski_form(q: int) -> QuadraticForm:
    """Q(x) = x1^2 - x2^2"""
    return make_form(make_field(q), [[1, 0], [0, -1]])


def restrict_form(Q: QuadraticForm, basis: Sequence[Sequence[int]]) -> QuadraticForm:
    """Form induced on span(basis) in basis coordinates, no rank check"""
    P = np.array(basis, dtype=np.int64).reshape(len(basis), Q.dim) % Q.q
    G = (P @ Q.matrix @ P.T) % Q.q
    return QuadraticForm(Q.field, tuple(tuple(int(v) for v in r) for r in G))


def orthogonal_complement(Q: QuadraticForm, vectors: Sequence[Sequence[int]]) -> np.ndarray:
    """Basis (rows) of {x : <x, v> = 0 for all v}"""
    if len(vectors) == 0:
        return np.eye(Q.dim, dtype=np.int64)
    V = np.array(vectors, dtype=np.int64).reshape(len(vectors), Q.dim) % Q.q
    return modlinalg.nullspace_mod((V @ Q.matrix) % Q.q, Q.q)


# =====================================================
# ISOMETRY CLASSES AND SPHERES
# =====================================================

class FormKind(Enum):
    SPLIT_EVEN = "SplitEven"
    NONSPLIT_EVEN = "NonSplitEven"
    ODD = "Odd"


@dataclass(frozen=True)
class FormClass:
    """Isometry class of a non-degenerate form.

    For odd d = 2n+1 the form is nH + c x^2 and anisotropic_coefficient holds the
    square-class representative of c: 1 or the least nonsquare.
    """
    q: int
    dim: int
    disc_is_square: bool
    kind: FormKind
    anisotropic_coefficient: Optional[int] = None

    @property
    def half_dim(self) -> int:
        return self.dim // 2


def classify_form(Q: QuadraticForm) -> FormClass:
    if Q.is_degenerate():
        raise DegenerateForm(f"{Q} is degenerate")
    field = Q.field
    disc = Q.determinant
    n = Q.dim // 2
    signed = ((-1) ** n * disc) % Q.q
    if Q.dim % 2 == 0:
        kind = FormKind.SPLIT_EVEN if field.is_square(signed) else FormKind.NONSPLIT_EVEN
        fc = FormClass(Q.q, Q.dim, field.is_square(disc), kind)
    else:
        coefficient = 1 if field.is_square(signed) else field.nonsquare()
        fc = FormClass(Q.q, Q.dim, field.is_square(disc), FormKind.ODD, coefficient)
    logger.debug(f"Classified {Q} as {fc.kind.value}")
    return fc


def form_of_class(q: int, d: int, disc_is_square: bool) -> QuadraticForm:
    """Diagonal representative diag(1, ..., 1, c) of the class with the given discriminant"""
    field = make_field(q)
    c = 1 if disc_is_square else field.nonsquare()
    gram = np.eye(d, dtype=np.int64)
    gram[d - 1, d - 1] = c
    return make_form(field, gram.tolist())


def witt_index(fc: FormClass) -> int:
    if fc.kind == FormKind.NONSPLIT_EVEN:
        return fc.half_dim - 1
    return fc.half_dim


def sphere_size_formula(fc: FormClass, r: int) -> int:
    """Closed-form |{x : Q(x) = r}| for a non-degenerate form of class fc"""
    q, d = fc.q, fc.dim
    r %= q
    if fc.kind == FormKind.ODD:
        if r == 0:
            return q ** (d - 1)
        field = make_field(q)
        return q ** (d - 1) + q ** ((d - 1) // 2) * field.legendre(r * fc.anisotropic_coefficient)
    sign = 1 if fc.kind == FormKind.SPLIT_EVEN else -1
    if r == 0:
        return q ** (d - 1) + sign * (q ** (d // 2) - q ** ((d - 2) // 2))
    return q ** (d - 1) - sign * q ** ((d - 2) // 2)


def sphere_points(Q: QuadraticForm, r: int) -> "PointSet":
    """Exact enumeration of {x : Q(x) = r}"""
    return PointSet(Q.q, Q.dim, Q.all_norms == (r % Q.q))


# =====================================================
# POINT SETS
# =====================================================

@dataclass(frozen=True, eq=False)
class PointSet:
    """Subset of F_q^d held as a membership bit-vector over point indices"""
    q: int
    dim: int
    membership: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.membership, dtype=bool)
        if mask.shape != (self.q ** self.dim,):
            raise ValueError(f"membership must have length q^d = {self.q ** self.dim}")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, 'membership', mask)

    @classmethod
    def empty(cls, q: int, d: int) -> "PointSet":
        return cls(q, d, np.zeros(q ** d, dtype=bool))

    @classmethod
    def full(cls, q: int, d: int) -> "PointSet":
        return cls(q, d, np.ones(q ** d, dtype=bool))

    @classmethod
    def from_indices(cls, q: int, d: int, indices: Iterable[int]) -> "PointSet":
        mask = np.zeros(q ** d, dtype=bool)
        mask[np.asarray(list(indices), dtype=np.int64)] = True
        return cls(q, d, mask)

    @classmethod
    def from_points(cls, q: int, d: int, points: Iterable[Sequence[int]]) -> "PointSet":
        pts = [tuple(p) for p in points]
        for p in pts:
            if len(p) != d:
                raise ValueError(f"point {p} does not have {d} coordinates")
        if not pts:
            return cls.empty(q, d)
        return cls.from_indices(q, d, encode_points(np.array(pts, dtype=np.int64), q))

    def __len__(self) -> int:
        return int(self.membership.sum())

    @property
    def size(self) -> int:
        return len(self)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.membership)

    def coords(self) -> np.ndarray:
        """Member coordinates, rows in index order"""
        return all_points(self.q, self.dim)[self.indices()]

    def points(self) -> List[Vector]:
        return [tuple(int(v) for v in row) for row in self.coords()]

    def __contains__(self, point) -> bool:
        return bool(self.membership[point_index(point, self.q)])

    def __iter__(self):
        return iter(self.points())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (self.q, self.dim) == (other.q, other.dim) and bool(np.array_equal(self.membership, other.membership))

    def __hash__(self) -> int:
        return hash((self.q, self.dim, self.membership.tobytes()))

    def _check(self, other: "PointSet"):
        if (self.q, self.dim) != (other.q, other.dim):
            raise ValueError("point sets live in different spaces")

    def union(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.q, self.dim, self.membership | other.membership)

    def intersection(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.q, self.dim, self.membership & other.membership)

    def difference(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.q, self.dim, self.membership & ~other.membership)

    def transform(self, matrix: np.ndarray) -> "PointSet":
        """Image under x -> M x"""
        M = np.asarray(matrix, dtype=np.int64)
        images = (self.coords() @ M.T) % self.q
        return PointSet.from_indices(self.q, self.dim, encode_points(images, self.q))

    def translate(self, z: Sequence[int]) -> "PointSet":
        images = (self.coords() + np.asarray(z, dtype=np.int64)) % self.q
        return PointSet.from_indices(self.q, self.dim, encode_points(images, self.q))

    def negation(self) -> "PointSet":
        return self.transform(-np.eye(self.dim, dtype=np.int64))

    def __repr__(self) -> str:
        return f"PointSet(q={self.q}, d={self.dim}, size={len(self)})"


# =====================================================
# NULL STRUCTURE
# =====================================================

@dataclass(frozen=True)
class NullStructure:
    """Mutually orthogonal independent null vectors, optionally with a completion vector e
    satisfying <e, e> = 1, <e, n_1> = 1 and <e, n_i> = 0 for i > 1"""
    nulls: Tuple[Vector, ...]
    completion: Optional[Vector] = None
    completion_gram: Optional[Tuple[Tuple[int, ...], ...]] = None
    cross_constant: Optional[int] = None


def _projective_representatives(q: int, d: int) -> np.ndarray:
    """Indices of vectors whose first nonzero coordinate is 1, in index order"""
    pts = all_points(q, d)
    nonzero = pts != 0
    has = nonzero.any(axis=1)
    first = pts[np.arange(len(pts)), np.argmax(nonzero, axis=1)]
    return np.flatnonzero(has & (first == 1))


def find_null_structure(Q: QuadraticForm, m: int, complete: bool = False) -> NullStructure:
    """Greedy search for m independent, mutually orthogonal null vectors.

    Candidates are projective representatives visited in index order. Any totally
    isotropic subspace extends to a maximal one, so the greedy pass succeeds whenever
    m does not exceed the Witt index.
    """
    fc = classify_form(Q)
    if m > Q.dim // 2:
        raise InfeasibleCount(f"m={m} exceeds floor(d/2)={Q.dim // 2}")
    w = witt_index(fc)
    if m >= 1 and w == 0:
        raise NoNullVector(f"{Q} is anisotropic")
    if m > w:
        raise InfeasibleCount(f"m={m} exceeds the Witt index {w} of a {fc.kind.value} form")

    q = Q.q
    pts = all_points(q, Q.dim)
    nulls: List[np.ndarray] = []
    for idx in _projective_representatives(q, Q.dim):
        if len(nulls) == m:
            break
        if Q.all_norms[idx] != 0:
            continue
        v = pts[idx]
        if any(Q.inner(v, n) != 0 for n in nulls):
            continue
        if modlinalg.rank_mod(np.array(nulls + [v]), q) == len(nulls) + 1:
            nulls.append(v.copy())
    if len(nulls) < m:
        raise InfeasibleCount(f"only found {len(nulls)} of {m} null vectors")

    if not complete:
        return NullStructure(tuple(tuple(int(x) for x in n) for n in nulls))
    return _complete_null_structure(Q, nulls)


def _complete_null_structure(Q: QuadraticForm, nulls: List[np.ndarray]) -> NullStructure:
    q = Q.q
    k = len(nulls)
    if Q.dim != 2 * k or k == 0:
        raise InfeasibleCount(f"completion needs d = 2m, got d={Q.dim}, m={k}")
    field = Q.field
    augment = modlinalg.complete_basis(nulls, q, Q.dim)
    G = np.array([[Q.inner(v, n) for n in nulls] for v in augment], dtype=np.int64)
    target = np.zeros(k, dtype=np.int64)
    target[0] = 1
    x = modlinalg.solve_mod(G.T, target, q)
    if x is None:
        raise SingularGram(f"Gram system {G.tolist()} is singular mod {q}")
    e = (x @ np.array(augment, dtype=np.int64)) % q
    s = Q.norm(e)

    n1 = nulls[0]
    root = field.sqrt(s) if s else None
    if root is not None:
        # rescale n_1 by root, which divides e by root and leaves <e, n_1> = 1
        n1 = (n1 * root) % q
        e = (e * field.inv(root)) % q
    else:
        e = (e + ((1 - s) * field.inv(2)) % q * n1) % q
    nulls = [n1] + nulls[1:]

    assert Q.norm(e) == 1 and Q.inner(e, nulls[0]) == 1
    logger.debug(f"Completion vector {e.tolist()} for nulls {[n.tolist() for n in nulls]}")
    return NullStructure(
        nulls=tuple(tuple(int(v) for v in n) for n in nulls),
        completion=tuple(int(v) for v in e),
        completion_gram=tuple(tuple(int(v) for v in row) for row in G),
        cross_constant=(2 * Q.inner(e, nulls[0])) % q,
    )


def radical_split(Q: QuadraticForm, basis: Sequence[Sequence[int]]) -> Tuple[int, QuadraticForm]:
    """Dimension of the radical of Q restricted to span(basis), and the
    non-degenerate form on a complement of the radical"""
    q = Q.q
    P = np.array(basis, dtype=np.int64).reshape(len(basis), Q.dim) % q
    m = P.shape[0]
    if m and modlinalg.rank_mod(P, q) < m:
        raise DependentBasis(f"{P.tolist()} is not independent mod {q}")
    G = restrict_form(Q, P)
    if m == 0:
        return 0, QuadraticForm(Q.field, ())
    radical = modlinalg.nullspace_mod(G.matrix, q)
    complement = modlinalg.complete_basis(list(radical), q, m)
    if not complement:
        return m, QuadraticForm(Q.field, ())
    return radical.shape[0], restrict_form(G, complement)


def is_good_subspace(Q: QuadraticForm, basis: Sequence[Sequence[int]]) -> bool:
    """V ∩ V^perp = 0, i.e. Q restricted to V is non-degenerate"""
    null_rank, _ = radical_split(Q, basis)
    return null_rank == 0


# =====================================================
# NULL LINES OF THE DOT PLANE (q = 1 mod 4)
# =====================================================

@dataclass(frozen=True)
class NullBasis:
    """n_+ = (1, i), n_- = (1, -i) with i^2 = -1; working basis (b1, b2) = (n_+, n_-/2)"""
    q: int
    iota: int
    n_plus: Vector
    n_minus: Vector
    b1: Vector
    b2: Vector
    kappa: int

    def coordinates(self, coords: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(n_+ coefficient, n_- coefficient) of each row"""
        X = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
        half = pow(2, self.q - 2, self.q)
        plus = ((X[:, 0] - self.iota * X[:, 1]) * half) % self.q
        minus = ((X[:, 0] + self.iota * X[:, 1]) * half) % self.q
        return plus, minus

    def line(self, sign: int) -> PointSet:
        """L_+ (sign > 0) or L_- (sign < 0)"""
        plus, minus = self.coordinates(all_points(self.q, 2))
        return PointSet(self.q, 2, (minus == 0) if sign > 0 else (plus == 0))


def null_line_basis(q: int) -> NullBasis:
    field = make_field(q)
    if q % 4 != 1:
        raise WrongResidueClass(f"null lines of the dot plane need q = 1 mod 4, got q={q}")
    iota = field.sqrt(q - 1)
    half = field.inv(2)
    n_plus = (1, iota)
    n_minus = (1, (-iota) % q)
    b2 = (half, (-iota * half) % q)
    Q = dot_form(q, 2)
    kappa = (2 * Q.inner(n_plus, b2)) % q
    return NullBasis(q, iota, n_plus, n_minus, n_plus, b2, kappa)
