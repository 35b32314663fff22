import csv
import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import NotOnSphere
from geometry import PointSet, dot_form, sphere_points
from simplices import (CongruenceMode, DistanceMatrix, ScalingMode, class_stabilizer_size,
                       count_congruence_classes, count_similarity_classes, count_unordered_classes,
                       degenerate_class_bound, distance_matrix, distinct_distance_matrices,
                       dot_level_decomposition, good_simplex_stabilizer_check, mu_count, nu_count, nu_table,
                       similarity_classes, similarity_identity_diagnostic, verify_counting_identity,
                       write_class_inventory)

F3_SQUARED = 9


def subsets_of_f3_plane(min_size: int = 1):
    return st.sets(st.integers(0, F3_SQUARED - 1), min_size=min_size).map(
        lambda idx: PointSet.from_indices(3, 2, sorted(idx)))


class TestDistanceMatrix:
    def test_entries(self, dot5):
        dm = distance_matrix(dot5, [(0, 0), (1, 0), (0, 2)])
        assert dm.entries == (1, 4, 0)
        assert dm.entry(2, 1) == 0
        assert dm.full().tolist() == [[0, 1, 4], [1, 0, 0], [4, 0, 0]]

    def test_key_order(self):
        dm = DistanceMatrix(5, 2, (1, 4, 0))
        assert DistanceMatrix.from_key(dm.key(), 5, 2) == dm

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            DistanceMatrix(5, 2, (1, 2))


class TestCongruenceCounts:
    def test_full_plane_q3(self, dot3):
        full = PointSet.full(3, 2)
        fast = count_congruence_classes(full, 1, dot3)
        assert fast.total == 3
        assert (fast.degenerate_classes, fast.nondegenerate_classes) == (1, 2)
        exact = count_congruence_classes(full, 1, dot3, CongruenceMode.EXACT_ORBIT)
        assert exact.total == 3

    def test_two_points(self, dot3):
        E = PointSet.from_points(3, 2, [(0, 0), (1, 0)])
        assert count_congruence_classes(E, 1, dot3).total == 2
        assert count_congruence_classes(E, 1, dot3, CongruenceMode.EXACT_ORBIT).total == 2

    def test_empty(self, dot3):
        assert count_congruence_classes(PointSet.empty(3, 2), 1, dot3).total == 0

    def test_inventory_multiplicities(self, dot3):
        E = PointSet.from_points(3, 2, [(0, 0), (1, 0), (1, 1), (2, 2)])
        for mode in CongruenceMode:
            cc = count_congruence_classes(E, 2, dot3, mode, with_inventory=True)
            assert sum(rec.mu for rec in cc.inventory) == len(E) ** 3
            assert len(cc.inventory) == cc.total

    def test_inventory_mu_matches_backtracking(self, dot3):
        E = PointSet.from_points(3, 2, [(0, 0), (1, 0), (2, 1), (0, 2)])
        cc = count_congruence_classes(E, 2, dot3, with_inventory=True)
        for rec in cc.inventory:
            assert mu_count(E, rec.distances, dot3) == rec.mu

    def test_write_inventory(self, dot3, tmp_path):
        cc = count_congruence_classes(PointSet.full(3, 2), 1, dot3, CongruenceMode.EXACT_ORBIT,
                                      with_inventory=True)
        path = tmp_path / "classes.csv"
        write_class_inventory(cc, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["class_id", "representative_entries", "mu", "stabilizer_size", "degenerate"]
        assert sorted(int(r[3]) for r in rows[1:]) == [2, 2, 8]

    @given(E=subsets_of_f3_plane(), k=st.integers(1, 2))
    def test_exact_refines_fast(self, E, k, dot3, group3):
        fast = count_congruence_classes(E, k, dot3)
        exact = count_congruence_classes(E, k, dot3, CongruenceMode.EXACT_ORBIT, group=group3)
        pinned = count_congruence_classes(E, k, dot3, CongruenceMode.EXACT_ORBIT_PINNED, group=group3)
        assert exact.total >= fast.total
        assert exact.nondegenerate_classes == fast.nondegenerate_classes
        assert pinned.total >= exact.total


class TestStabilizers:
    @pytest.mark.parametrize("simplex,size", [
        ([(0, 0), (1, 0)], 2),
        ([(0, 0), (0, 0)], 8),
        ([(0, 0), (1, 0), (0, 1)], 1),
        ([(1, 1)], 8),
    ])
    def test_q3(self, dot3, simplex, size):
        assert class_stabilizer_size(dot3, simplex) == size

    def test_good_simplex(self, dot3, dot5):
        check = good_simplex_stabilizer_check(dot3, [(0, 0), (1, 0)])
        assert check.good and check.holds
        assert check.complement_group_order == 2
        null_edge = good_simplex_stabilizer_check(dot5, [(0, 0), (1, 2)])
        assert not null_edge.good


class TestCountingIdentity:
    def test_documented_example(self, dot3):
        check = verify_counting_identity(PointSet.from_points(3, 2, [(0, 0), (1, 0)]), 1, dot3)
        assert (check.lhs, check.rhs) == (40, 40)

    @given(E=subsets_of_f3_plane(), k=st.integers(1, 2))
    def test_identity_on_random_sets(self, E, k, dot3, group3):
        assert verify_counting_identity(E, k, dot3, group=group3).holds

    def test_nu(self, dot3, group3):
        E = PointSet.from_points(3, 2, [(0, 0), (1, 0)])
        identity = group3.element(group3.index_of([[1, 0], [0, 1]]))
        table = nu_table(E, identity)
        assert table.sum() == 4
        assert table[0] == 2
        assert nu_count(E, identity, (0, 0)) == 2
        assert nu_count(E, identity, (1, 0)) == 1


class TestSimilarity:
    def test_full_plane(self, dot3):
        full = PointSet.full(3, 2)
        assert count_similarity_classes(full, 1, dot3) == 3
        assert count_similarity_classes(full, 1, dot3, ScalingMode.ALL_SCALARS) == 2
        assert count_unordered_classes(full, 1, dot3) == 3
        assert len(distinct_distance_matrices(full, 1, dot3)) == 3

    def test_degenerate_bound(self, dot3):
        assert degenerate_class_bound(dot3, 1).holds

    @pytest.mark.parametrize("q", [3, 5])
    def test_degenerate_bound_triangles(self, q):
        check = degenerate_class_bound(dot_form(q, 2), 2)
        assert check.degenerate_classes > 0
        assert check.holds

    def test_similarity_diagnostic_two_points(self, dot5):
        E = PointSet.from_points(5, 2, [(0, 0), (1, 0)])
        # four similarity classes of two triangles each; rotations of e1 by r theta give 84
        assert similarity_identity_diagnostic(E, dot5) == (16, 84)


class TestWideKeys:
    """Distance-matrix keys past the int64 range (q^10 > 2^63 for 4-simplices at q = 83)"""

    POINTS = [(0, 0, 0, 0), (1, 2, 3, 4), (5, 0, 7, 11)]

    def test_matrices_match_enumeration(self):
        Q = dot_form(83, 4)
        E = PointSet.from_points(83, 4, self.POINTS)
        expected = {distance_matrix(Q, t) for t in itertools.product(self.POINTS, repeat=5)}
        found = distinct_distance_matrices(E, 4, Q)
        assert len(found) == len(expected)
        assert set(found) == expected
        assert count_congruence_classes(E, 4, Q).total == len(expected)
        assert count_similarity_classes(E, 4, Q) == len(similarity_classes(expected))


class TestDotLevels:
    def test_unit_circle_q3(self, dot3):
        report = dot_level_decomposition(sphere_points(dot3, 1), dot3)
        assert report.nu_by_level == (8, 4, 4)
        assert report.sum_f_squared == 128
        assert (report.S, report.T, report.R) == (64, 32, 32)
        assert report.nu_square_sum == 96
        assert report.holds

    def test_off_sphere(self, dot3):
        with pytest.raises(NotOnSphere):
            dot_level_decomposition(PointSet.from_points(3, 2, [(1, 0), (1, 1)]), dot3)
        with pytest.raises(NotOnSphere):
            dot_level_decomposition(PointSet.from_points(3, 2, [(0, 0)]), dot3)

    @given(data=st.data())
    def test_decomposition_on_subsets(self, data):
        Q = dot_form(5, 2)
        idx = sphere_points(Q, 1).indices().tolist()
        chosen = data.draw(st.sets(st.sampled_from(idx), min_size=1))
        assert dot_level_decomposition(PointSet.from_indices(5, 2, sorted(chosen)), Q, radius=1).holds
