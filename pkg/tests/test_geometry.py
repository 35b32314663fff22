import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import DegenerateForm, DependentBasis, InfeasibleCount, NoNullVector, NotSymmetric, WrongResidueClass
from geometry import (FormKind, PointSet, all_points, classify_form, dot_form, find_null_structure,
                      form_of_class, hyperbolic_form, index_point, is_good_subspace, make_form,
                      minkowski_form, null_line_basis, orthogonal_complement, point_index, radical_split,
                      sphere_points, sphere_size_formula, witt_index)
from gf import make_field


class TestPointIndexing:
    def test_little_endian(self):
        assert point_index((1, 2), 5) == 11
        assert index_point(11, 5, 2) == (1, 2)
        assert all_points(3, 2)[5].tolist() == [2, 1]

    @given(q=st.sampled_from([3, 5, 7]), data=st.data())
    def test_index_inverts_point(self, q, data):
        index = data.draw(st.integers(min_value=0, max_value=q ** 3 - 1))
        assert point_index(index_point(index, q, 3), q) == index


class TestForms:
    def test_make_form_rejects_asymmetric(self):
        with pytest.raises(NotSymmetric):
            make_form(make_field(5), [[1, 2], [3, 1]])
        with pytest.raises(NotSymmetric):
            make_form(make_field(5), [[1, 2]])

    def test_entries_reduced(self):
        Q = make_form(make_field(5), [[6, -1], [-1, 11]])
        assert Q.gram == ((1, 4), (4, 1))

    def test_norm_and_inner(self, dot5):
        assert dot5.norm((1, 2)) == 0
        assert dot5.inner((1, 2), (3, 4)) == 1
        assert hyperbolic_form(7).norm((3, 5)) == 1

    def test_degenerate_form(self):
        Q = make_form(make_field(3), [[1, 0], [0, 0]])
        assert Q.is_degenerate()
        with pytest.raises(DegenerateForm):
            classify_form(Q)

    @pytest.mark.parametrize("q,kind", [(5, FormKind.SPLIT_EVEN), (13, FormKind.SPLIT_EVEN),
                                        (3, FormKind.NONSPLIT_EVEN), (7, FormKind.NONSPLIT_EVEN)])
    def test_dot_plane_kind(self, q, kind):
        assert classify_form(dot_form(q, 2)).kind == kind

    @pytest.mark.parametrize("q", [3, 5, 7, 11])
    def test_minkowski_planes_split(self, q):
        assert classify_form(minkowski_form(q)).kind == FormKind.SPLIT_EVEN
        assert classify_form(hyperbolic_form(q)).kind == FormKind.SPLIT_EVEN

    def test_odd_class_uses_square_class_representative(self):
        field = make_field(5)
        assert classify_form(make_form(field, [[1, 0, 0], [0, 1, 0], [0, 0, 4]])) == classify_form(dot_form(5, 3))
        nonsquare = classify_form(make_form(field, [[1, 0, 0], [0, 1, 0], [0, 0, 2]]))
        assert nonsquare.anisotropic_coefficient == 2
        assert nonsquare == classify_form(make_form(field, [[1, 0, 0], [0, 1, 0], [0, 0, 3]]))
        assert classify_form(dot_form(5, 3)).anisotropic_coefficient == 1

    def test_witt_index(self):
        assert witt_index(classify_form(dot_form(3, 2))) == 0
        assert witt_index(classify_form(dot_form(5, 2))) == 1
        assert witt_index(classify_form(dot_form(3, 3))) == 1
        assert witt_index(classify_form(dot_form(3, 4))) == 2

    def test_form_of_class(self):
        assert form_of_class(7, 2, False).gram == ((1, 0), (0, 3))
        assert classify_form(form_of_class(7, 3, False)).disc_is_square is False

    def test_complement(self, dot5):
        perp = orthogonal_complement(dot5, [(1, 2)])
        assert perp.shape == (1, 2)
        assert dot5.inner(perp[0], (1, 2)) == 0


class TestSpheres:
    def test_dot_plane_q5(self, dot5):
        fc = classify_form(dot5)
        assert sphere_size_formula(fc, 0) == 9
        assert [sphere_size_formula(fc, r) for r in range(1, 5)] == [4, 4, 4, 4]
        assert len(sphere_points(dot5, 0)) == 9

    def test_known_sizes(self):
        assert sphere_size_formula(classify_form(dot_form(3, 3)), 1) == 6
        assert sphere_size_formula(classify_form(dot_form(3, 4)), 1) == 24
        assert len(sphere_points(dot_form(3, 3), 1)) == 6

    @given(q=st.sampled_from([3, 5, 7, 11]), d=st.integers(1, 4), square=st.booleans())
    def test_formula_matches_enumeration(self, q, d, square):
        Q = form_of_class(q, d, square)
        fc = classify_form(Q)
        counted = np.bincount(Q.all_norms, minlength=q)
        assert [int(c) for c in counted] == [sphere_size_formula(fc, r) for r in range(q)]


class TestPointSet:
    def test_membership(self):
        E = PointSet.from_points(3, 2, [(0, 0), (1, 0), (1, 0)])
        assert len(E) == 2
        assert (1, 0) in E and (0, 1) not in E
        assert E.points() == [(0, 0), (1, 0)]

    def test_algebra(self):
        A = PointSet.from_points(3, 2, [(0, 0), (1, 0)])
        B = PointSet.from_points(3, 2, [(1, 0), (2, 2)])
        assert len(A.union(B)) == 3
        assert A.intersection(B).points() == [(1, 0)]
        assert A.difference(B).points() == [(0, 0)]
        assert A.translate((1, 1)).points() == [(1, 1), (2, 1)]
        assert A.negation().points() == [(0, 0), (2, 0)]
        assert B.transform([[0, 1], [1, 0]]) == PointSet.from_points(3, 2, [(0, 1), (2, 2)])

    def test_mismatched_spaces(self):
        with pytest.raises(ValueError):
            PointSet.full(3, 2).union(PointSet.full(5, 2))
        with pytest.raises(ValueError):
            PointSet.from_points(3, 2, [(0, 0, 0)])

    def test_hashable(self):
        assert len({PointSet.full(3, 2), PointSet.full(3, 2), PointSet.empty(3, 2)}) == 2


class TestNullStructure:
    def test_first_null_vector_q5(self, dot5):
        assert find_null_structure(dot5, 1).nulls == ((1, 2),)

    def test_anisotropic_plane(self, dot3):
        with pytest.raises(NoNullVector):
            find_null_structure(dot3, 1)

    def test_too_many(self, dot5):
        with pytest.raises(InfeasibleCount):
            find_null_structure(dot5, 2)
        with pytest.raises(InfeasibleCount):
            find_null_structure(dot_form(3, 3), 2)

    @pytest.mark.parametrize("q,d", [(5, 2), (3, 4), (5, 4), (7, 4)])
    def test_completion(self, q, d):
        Q = dot_form(q, d)
        ns = find_null_structure(Q, d // 2, complete=True)
        e = ns.completion
        assert Q.norm(e) == 1
        assert Q.inner(e, ns.nulls[0]) == 1
        assert all(Q.inner(e, n) == 0 for n in ns.nulls[1:])
        assert all(Q.norm(n) == 0 for n in ns.nulls)
        assert ns.cross_constant == 2

    def test_completion_needs_maximal(self):
        with pytest.raises(InfeasibleCount):
            find_null_structure(dot_form(5, 4), 1, complete=True)


class TestRadical:
    def test_null_line(self, dot5):
        rank, form = radical_split(dot5, [(1, 2)])
        assert rank == 1
        assert form.dim == 0
        assert not is_good_subspace(dot5, [(1, 2)])

    def test_unit_line(self, dot5):
        rank, form = radical_split(dot5, [(1, 0)])
        assert rank == 0
        assert form.gram == ((1,),)
        assert is_good_subspace(dot5, [(1, 0)])

    def test_dependent(self, dot5):
        with pytest.raises(DependentBasis):
            radical_split(dot5, [(1, 2), (2, 4)])


class TestNullLines:
    def test_basis_q5(self):
        nb = null_line_basis(5)
        assert nb.iota == 2
        assert nb.n_plus == (1, 2)
        assert nb.b2 == (3, 4)
        assert nb.kappa == 2

    def test_lines_are_null(self, dot5):
        nb = null_line_basis(5)
        for sign in (1, -1):
            line = nb.line(sign)
            assert len(line) == 5
            assert all(dot5.norm(p) == 0 for p in line)
        assert nb.line(1).intersection(nb.line(-1)).points() == [(0, 0)]
        assert (1, 2) in nb.line(1)

    def test_wrong_class(self):
        with pytest.raises(WrongResidueClass):
            null_line_basis(7)
