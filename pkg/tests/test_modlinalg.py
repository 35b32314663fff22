import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modlinalg import complete_basis, det_mod, inverse_mod, nullspace_mod, rank_mod, row_reduce, solve_mod


def matrices(q: int, n: int):
    return st.lists(st.integers(min_value=0, max_value=q - 1), min_size=n * n, max_size=n * n).map(
        lambda xs: np.array(xs, dtype=np.int64).reshape(n, n))


class TestElimination:
    def test_det(self):
        assert det_mod([[1, 2], [3, 4]], 5) == 3
        assert det_mod([[1, 2], [2, 4]], 5) == 0
        assert det_mod([[0, 1], [1, 0]], 7) == 6

    def test_det_needs_square(self):
        with pytest.raises(ValueError):
            det_mod([[1, 2, 3], [4, 5, 6]], 7)

    def test_rank(self):
        assert rank_mod([[1, 2], [2, 4]], 5) == 1
        assert rank_mod([[1, 0], [0, 3]], 3) == 1
        assert rank_mod(np.zeros((0, 3), dtype=np.int64), 3) == 0

    def test_row_reduce_pivots(self):
        R, pivots = row_reduce(np.array([[2, 4, 1], [1, 2, 0]]), 7)
        assert pivots == [0, 2]
        assert R[0].tolist() == [1, 2, 0]

    def test_nullspace(self):
        basis = nullspace_mod([[1, 1]], 3)
        assert basis.tolist() == [[2, 1]]
        assert nullspace_mod([[1, 0], [0, 1]], 5).shape == (0, 2)

    def test_singular_system(self):
        assert solve_mod([[1, 2], [2, 4]], [1, 0], 5) is None
        assert inverse_mod([[1, 2], [2, 4]], 5) is None

    def test_complete_basis(self):
        added = complete_basis([(1, 0, 0)], 3, 3)
        assert [v.tolist() for v in added] == [[0, 1, 0], [0, 0, 1]]
        added = complete_basis([(1, 1)], 5, 2)
        assert [v.tolist() for v in added] == [[1, 0]]


class TestIdentities:
    @given(A=matrices(7, 3))
    def test_inverse_iff_nonzero_det(self, A):
        inv = inverse_mod(A, 7)
        if det_mod(A, 7) == 0:
            assert inv is None
        else:
            assert ((A @ inv) % 7).tolist() == np.eye(3, dtype=np.int64).tolist()

    @given(A=matrices(5, 3), b=st.lists(st.integers(0, 4), min_size=3, max_size=3))
    def test_solve(self, A, b):
        x = solve_mod(A, b, 5)
        if x is not None:
            assert ((A @ x) % 5).tolist() == b

    @given(A=matrices(3, 3))
    def test_rank_nullity(self, A):
        kernel = nullspace_mod(A, 3)
        assert rank_mod(A, 3) + kernel.shape[0] == 3
        for v in kernel:
            assert not np.any((A @ v) % 3)

    @given(A=matrices(5, 2), B=matrices(5, 2))
    def test_det_is_multiplicative(self, A, B):
        assert det_mod((A @ B) % 5, 5) == (det_mod(A, 5) * det_mod(B, 5)) % 5
