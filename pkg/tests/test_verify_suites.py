import pytest

from config import Tolerances
from data_contracts import RunConfig
from verify_suites import ACCEPTANCE_TRIALS, SUITE_ORDER, run_suite, run_verify


@pytest.fixture(scope="module")
def small_run():
    return RunConfig(q_list=(3,), trials=2, seed=7)


@pytest.fixture(scope="module")
def all_results(small_run):
    return run_verify(small_run, trials=2)


class TestRunVerify:
    def test_every_suite_reports(self, all_results):
        assert [s for s in SUITE_ORDER if s not in {r.suite for r in all_results}] == []

    def test_suites_in_order(self, all_results):
        positions = [SUITE_ORDER.index(r.suite) for r in all_results]
        assert positions == sorted(positions)

    def test_all_pass(self, all_results):
        assert [(r.suite, r.case, r.detail) for r in all_results if not r.passed] == []

    def test_documented_identity_row(self, all_results):
        first = next(r for r in all_results if r.suite == "identity2")
        assert (first.lhs, first.rhs) == (40, 40)

    def test_unknown_suite(self, small_run):
        with pytest.raises(ValueError):
            run_suite("nope", small_run)

    def test_acceptance_trials_cover_random_suites(self):
        assert set(ACCEPTANCE_TRIALS) <= set(SUITE_ORDER)


class TestSingleSuites:
    def test_sphere_two_primes(self):
        results = run_suite("sphere", RunConfig(q_list=(5, 7)))
        assert len(results) == 12
        assert all(r.passed for r in results)

    def test_same_rows_on_rerun(self, small_run):
        first = run_suite("witt", small_run, 3)
        second = run_suite("witt", small_run, 3)
        assert [r.as_row() for r in first] == [r.as_row() for r in second]

    def test_group_budget_skips(self):
        results = run_suite("identity2", RunConfig(q_list=(5,), group_budget=3), 1)
        assert results[0].passed
        assert "skipped" in results[1].detail

    def test_fourier_with_tolerances(self, small_run):
        results = run_suite("fourier", small_run, 3, Tolerances(spectral_abs=1e-10, spectral_rel=1e-8))
        assert all(r.passed for r in results)
