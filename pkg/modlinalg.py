"""
Exact linear algebra over F_q on integer numpy arrays.
Gaussian elimination with modular inverses; every result is reduced into [0, q).
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def as_matrix(rows, q: int) -> np.ndarray:
    A = np.array(rows, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else A.reshape(0, 0)
    return A % q


def _inv(a: int, q: int) -> int:
    return pow(int(a) % q, q - 2, q)


def row_reduce(A: np.ndarray, q: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form and pivot columns"""
    A = np.array(A, dtype=np.int64) % q
    m, n = A.shape
    pivots = []
    i = 0
    for j in range(n):
        if i >= m:
            break
        nz = np.nonzero(A[i:, j])[0]
        if nz.size == 0:
            continue
        i1 = i + int(nz[0])
        if i1 != i:
            A[[i, i1]] = A[[i1, i]]
        A[i] = (A[i] * _inv(A[i, j], q)) % q
        for r in range(m):
            if r != i and A[r, j]:
                A[r] = (A[r] - A[r, j] * A[i]) % q
        pivots.append(j)
        i += 1
    return A, pivots


def rank_mod(A, q: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(row_reduce(A, q)[1])


def det_mod(A, q: int) -> int:
    A = np.array(A, dtype=np.int64) % q
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"det of non-square matrix {A.shape}")
    det = 1
    for j in range(n):
        nz = np.nonzero(A[j:, j])[0]
        if nz.size == 0:
            return 0
        i1 = j + int(nz[0])
        if i1 != j:
            A[[j, i1]] = A[[i1, j]]
            det = -det
        pivot = int(A[j, j])
        det = (det * pivot) % q
        inv = _inv(pivot, q)
        for r in range(j + 1, n):
            if A[r, j]:
                A[r] = (A[r] - (A[r, j] * inv % q) * A[j]) % q
    return det % q


def nullspace_mod(A, q: int) -> np.ndarray:
    """Basis of {x : A x = 0}, one vector per row"""
    A = np.array(A, dtype=np.int64) % q
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = row_reduce(A, q)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for row, p in enumerate(pivots):
            v[p] = (-R[row, f]) % q
        basis.append(v)
    if not basis:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


def solve_mod(A, b, q: int) -> Optional[np.ndarray]:
    """Unique solution of A x = b, or None when A is singular"""
    A = np.array(A, dtype=np.int64) % q
    n = A.shape[0]
    if A.shape != (n, n) or det_mod(A, q) == 0:
        return None
    aug = np.concatenate([A, np.array(b, dtype=np.int64).reshape(n, 1) % q], axis=1)
    R, _ = row_reduce(aug, q)
    return R[:, n].copy()


def inverse_mod(A, q: int) -> Optional[np.ndarray]:
    A = np.array(A, dtype=np.int64) % q
    n = A.shape[0]
    if det_mod(A, q) == 0:
        return None
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    R, _ = row_reduce(aug, q)
    return R[:, n:].copy()


def complete_basis(vectors: Sequence[Sequence[int]], q: int, d: int) -> List[np.ndarray]:
    """Standard basis vectors that extend an independent list to a basis of F_q^d"""
    current = [np.array(v, dtype=np.int64) % q for v in vectors]
    added = []
    for i in range(d):
        if len(current) == d:
            break
        e = np.zeros(d, dtype=np.int64)
        e[i] = 1
        if rank_mod(np.array(current + [e]), q) == len(current) + 1:
            current.append(e)
            added.append(e)
    return added
