import csv

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import BadExponent, NegativeValue, WrongResidueClass
from geometry import PointSet, hyperbolic_form, null_line_basis
from spectral import (character_matrix, check_mlem, check_plancherel, fourier_transform, mixed_cauchy_schwarz,
                      null_coordinate_prune, null_pair_count, nu_hat_identity_check, spherical_energy,
                      taylor_bound_check, transform_function, write_spectral_csv)


def plane_subsets(q: int):
    return st.sets(st.integers(0, q * q - 1), min_size=1).map(
        lambda idx: PointSet.from_indices(q, 2, sorted(idx)))


def from_null_coordinates(nb, pairs) -> PointSet:
    """Points a n_+ + b n_- for (a, b) in pairs"""
    q = nb.q
    points = {((a * nb.n_plus[0] + b * nb.n_minus[0]) % q, (a * nb.n_plus[1] + b * nb.n_minus[1]) % q)
              for a, b in pairs}
    return PointSet.from_points(q, 2, sorted(points))


class TestTransform:
    def test_characters(self):
        W = character_matrix(5)
        assert W.shape == (5, 5)
        assert np.allclose(W[0], 1)
        assert np.allclose(W @ W.conj().T, 5 * np.eye(5))

    def test_origin(self):
        table = fourier_transform(PointSet.from_points(3, 2, [(0, 0)]))
        assert np.allclose(table.values, 1 / 9)

    def test_full_space(self):
        table = fourier_transform(PointSet.full(5, 2))
        assert table.at((0, 0)) == pytest.approx(1)
        assert table.support().tolist() == [0]

    def test_null_line(self):
        line = null_line_basis(5).line(1)
        table = fourier_transform(line)
        on_line = np.abs(table.values[line.indices()])
        off_line = np.abs(np.delete(table.values, line.indices()))
        assert np.allclose(on_line, 1 / 5)
        assert np.allclose(off_line, 0)
        assert spherical_energy(line).sigma[0] == pytest.approx(1 / 5)

    def test_linear(self):
        rng = np.random.default_rng(7)
        f, g = rng.random(27), rng.random(27)
        assert np.allclose(transform_function(f + 2 * g, 3, 3),
                           transform_function(f, 3, 3) + 2 * transform_function(g, 3, 3))

    @given(E=plane_subsets(5))
    def test_plancherel(self, E):
        assert check_plancherel(E).holds

    @given(E=plane_subsets(3), data=st.data())
    def test_nu_hat(self, E, data, group3):
        theta = group3.matrices[data.draw(st.integers(0, group3.order - 1))]
        check = nu_hat_identity_check(E, theta)
        assert check.max_abs_error < 1e-9
        assert check.modulus_error < 1e-9


class TestEnergies:
    def test_single_point(self):
        energy = spherical_energy(PointSet.from_points(5, 2, [(2, 3)]))
        assert energy.sigma[0] == pytest.approx(9 / 625)
        assert energy.sigma[1] == pytest.approx(4 / 625)

    def test_full_space_has_no_energy_off_zero(self):
        energy = spherical_energy(PointSet.full(3, 2))
        assert energy.sigma[0] == pytest.approx(1)
        assert energy.M == pytest.approx(0, abs=1e-12)

    @pytest.mark.parametrize("E", [PointSet.from_points(7, 2, [(1, 1)]), PointSet.full(7, 2)])
    def test_mlem_on_extremes(self, E):
        assert check_mlem(E).holds

    def test_mlem_with_hyperbolic_form(self):
        E = PointSet.from_points(7, 2, [(x, y) for x in range(3) for y in range(3)])
        assert check_mlem(E, form=hyperbolic_form(7)).holds

    @given(E1=plane_subsets(5), E2=plane_subsets(5))
    def test_mixed_cauchy_schwarz(self, E1, E2):
        assert mixed_cauchy_schwarz(E1, E2)


class TestTaylorBound:
    def test_constant(self):
        assert taylor_bound_check([1.5, 1.5], 3) == pytest.approx((2 * 1.5 ** 3, 2 * 1.5 ** 3))

    def test_indicator(self):
        assert taylor_bound_check([1.0, 0.0], 2) == pytest.approx((1.0, 1.0))

    def test_mapping_input(self):
        assert taylor_bound_check({"a": 2.0, "b": 2.0}, 2) == pytest.approx((8.0, 8.0))

    def test_rejects(self):
        with pytest.raises(BadExponent):
            taylor_bound_check([1.0], 1)
        with pytest.raises(NegativeValue):
            taylor_bound_check([1.0, -0.5], 2)

    @given(values=st.lists(st.floats(min_value=0, max_value=10), min_size=1, max_size=30),
           n=st.integers(2, 6))
    def test_bound_holds(self, values, n):
        lhs, rhs = taylor_bound_check(values, n)
        assert lhs <= rhs * (1 + 1e-9) + 1e-9


class TestNullLines:
    def test_pair_count_on_a_line(self):
        line = null_line_basis(5).line(1)
        assert null_pair_count(line) == 25

    def test_pair_count_brute_force(self):
        E = PointSet.from_points(5, 2, [(0, 0), (1, 2), (3, 3), (4, 0), (2, 2)])
        nb = null_line_basis(5)
        null = nb.line(1).union(nb.line(-1))
        expected = sum(((u[0] - v[0]) % 5, (u[1] - v[1]) % 5) in null for u in E for v in E)
        assert null_pair_count(E) == expected

    def test_prune_rich_line(self):
        report = null_coordinate_prune(null_line_basis(5).line(1))
        assert report.discarded == 0
        assert not report.all_poor
        assert report.rich_family == "+"
        assert len(report.part1) + len(report.part2) == 5

    def test_prune_poor_set(self):
        report = null_coordinate_prune(PointSet.from_points(13, 2, [(0, 0), (1, 0)]))
        assert report.all_poor
        assert len(report.pruned) == 2

    def test_prune_keeps_rich_lines_whole(self):
        nb = null_line_basis(13)
        E = from_null_coordinates(nb, [(a, b) for a in range(13) for b in range(3)])
        report = null_coordinate_prune(E)
        assert report.discarded == 0
        assert report.rich_family == "+"
        assert (len(report.part1), len(report.part2)) == (26, 13)
        _, minus1 = nb.coordinates(report.part1.coords())
        _, minus2 = nb.coordinates(report.part2.coords())
        assert not set(minus1.tolist()) & set(minus2.tolist())
        # only L_- differences cross between the parts: one per n_+ coordinate and part-1 line
        assert null_pair_count(report.part1, report.part2) == 26
        assert null_pair_count(report.part1, report.part2) <= 4 * len(E) ** 1.5

    def test_prune_both_wealthy_cluster(self):
        nb = null_line_basis(13)
        coords = {(a, b) for a in range(13) for b in range(3)} | {(a, b) for a in range(3) for b in range(13)}
        E = from_null_coordinates(nb, coords)
        assert len(E) == 69
        report = null_coordinate_prune(E)
        assert (report.wealthy_plus_lines, report.wealthy_minus_lines) == (3, 3)
        assert report.discarded == 9
        assert report.discarded <= len(E) / 2
        assert len(report.pruned) == 60

    @given(E=plane_subsets(13))
    def test_poor_sets_obey_null_count_bound(self, E):
        report = null_coordinate_prune(E)
        assert len(report.pruned) >= len(E) / 2
        if report.all_poor:
            assert null_pair_count(report.pruned) <= 8 * len(report.pruned) ** 1.5

    def test_needs_q_one_mod_four(self):
        with pytest.raises(WrongResidueClass):
            null_pair_count(PointSet.full(7, 2))


class TestOutput:
    def test_csv(self, tmp_path):
        path = tmp_path / "spectrum.csv"
        write_spectral_csv(fourier_transform(PointSet.from_points(3, 2, [(0, 0)])), path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["xi_index", "re", "im"]
        assert len(rows) == 10
        assert float(rows[1][1]) == pytest.approx(1 / 9)
