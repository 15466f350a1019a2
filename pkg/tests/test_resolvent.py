import numpy as np
import pytest

from seektime import (
    fundamental_matrix,
    kemeny_trace,
    mean_hitting_times,
    mean_time_from_equilibrium,
    mean_time_to_equilibrium,
    stationary_distribution,
)
from seektime.resolvent import (
    constant_vector_residual,
    equilibrium_target_residual,
    harmonic_residual,
    hitting_recurrence_residual,
    return_time_residual,
    structure_residuals,
)
from conftest import cycle_chain, random_chain
from oracles import fundamental_series, hitting_matrix


@pytest.fixture
def two_state_parts(two_state):
    w = stationary_distribution(two_state)
    Z = fundamental_matrix(two_state, w, check=True)
    return two_state, w, Z


class TestFundamentalMatrix:
    def test_uniform_two_state_is_identity_minus_limit(self, uniform2):
        w = stationary_distribution(uniform2)
        Z = fundamental_matrix(uniform2, w)
        np.testing.assert_allclose(Z, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)

    def test_two_state_closed_form(self, two_state_parts):
        _, _, Z = two_state_parts
        expected = np.array([[5 / 9, -5 / 9], [-10 / 9, 10 / 9]])
        np.testing.assert_allclose(Z, expected, rtol=1e-12)

    def test_three_cycle_closed_form(self, cycle3):
        w = stationary_distribution(cycle3)
        Z = fundamental_matrix(cycle3, w, check=True)
        third = 1 / 3
        expected = [[third, 0.0, -third], [-third, third, 0.0], [0.0, -third, third]]
        np.testing.assert_allclose(Z, expected, atol=1e-12)

    def test_matches_series_oracle(self, two_state):
        w = stationary_distribution(two_state)
        Z = fundamental_matrix(two_state, w)
        np.testing.assert_allclose(Z, fundamental_series(two_state.entries, w, 300), rtol=1e-10)

    def test_single_state(self, single_state):
        w = stationary_distribution(single_state)
        np.testing.assert_array_equal(fundamental_matrix(single_state, w), [[0.0]])

    def test_structure_residuals_small_on_random_chains(self):
        rng = np.random.default_rng(5)
        for _ in range(100)        :
            P = random_chain(rng, int(rng.integers(2, 40)))
            w = stationary_distribution(P)
            Z = fundamental_matrix(P, w, check=True)
            res = structure_residuals(Z, w)
            assert res["row_sums"] <= 1e-9
            assert res["weighted_column_sums"] <= 1e-9
            # a walk must reach a state before exceeding its equilibrium visits
            assert (Z - np.diag(Z)[None, :]).max() <= 1e-12
            assert ((1 - w) / 2 - np.diag(Z)).max() <= 1e-9


class TestHittingTimes:
    def test_two_state_closed_form(self, two_state_parts):
        P, w, Z = two_state_parts
        M = mean_hitting_times(Z, w)
        np.testing.assert_allclose(M, [[0.0, 5.0], [2.5, 0.0]], rtol=1e-12)

    def test_uniform_two_state_geometric_mean(self, uniform2):
        w = stationary_distribution(uniform2)
        M = mean_hitting_times(fundamental_matrix(uniform2, w), w)
        np.testing.assert_allclose(M, [[0.0, 2.0], [2.0, 0.0]], rtol=1e-14)

    def test_cycle_walk_distances(self, cycle3):
        w = stationary_distribution(cycle3)
        M = mean_hitting_times(fundamental_matrix(cycle3, w), w)
        np.testing.assert_allclose(M, [[0, 1, 2], [2, 0, 1], [1, 2, 0]], atol=1e-12)

    def test_diagonal_exactly_zero(self, two_state_parts):
        _, w, Z = two_state_parts
        assert np.all(np.diag(mean_hitting_times(Z, w)) == 0.0)

    def test_matches_per_target_solve_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            P = random_chain(rng, int(rng.integers(2, 40)))
            w = stationary_distribution(P)
            M = mean_hitting_times(fundamental_matrix(P, w), w)
            np.testing.assert_allclose(M, hitting_matrix(P.entries), atol=1e-8)
            assert hitting_recurrence_residual(P, M) <= 1e-8
            off = M[~np.eye(P.n, dtype=bool)]
            assert off.min() >= 1.0 - 1e-12

    def test_return_time_identity(self, two_state_parts):
        P, w, Z = two_state_parts
        M = mean_hitting_times(Z, w)
        assert return_time_residual(P, M, w) <= 1e-10


class TestKemenyTrace:
    def test_anchors(self, uniform2, two_state, cycle3):
        for P, expected in ((uniform2, 1.0), (two_state, 5 / 3), (cycle3, 1.0)):
            w = stationary_distribution(P)
            assert kemeny_trace(fundamental_matrix(P, w)) == pytest.approx(expected, rel=1e-12)

    def test_single_state_is_zero(self, single_state):
        w = stationary_distribution(single_state)
        assert kemeny_trace(fundamental_matrix(single_state, w)) == 0.0


class TestSeekTimes:
    def test_two_state_report(self, two_state_parts):
        _, w, Z = two_state_parts
        M = mean_hitting_times(Z, w)
        report = mean_time_to_equilibrium(M, w)
        np.testing.assert_allclose(report.to_equilibrium, [5 / 3, 5 / 3], rtol=1e-12)
        assert report.constancy_spread <= 1e-8 * max(1.0, report.kemeny)
        assert report.kemeny == pytest.approx(5 / 3, rel=1e-12)

    def test_cycle_times_all_one(self, cycle3):
        w = stationary_distribution(cycle3)
        M = mean_hitting_times(fundamental_matrix(cycle3, w), w)
        report = mean_time_to_equilibrium(M, w)
        np.testing.assert_allclose(report.to_equilibrium, np.ones(3), rtol=1e-12)

    def test_from_equilibrium_two_state(self, two_state_parts):
        _, w, Z = two_state_parts
        from_eq = mean_time_from_equilibrium(Z, w)
        np.testing.assert_allclose(from_eq, [5 / 6, 10 / 3], rtol=1e-12)
        # reweighting the targets by the stationary law recovers the constant
        assert from_eq @ w == pytest.approx(5 / 3, rel=1e-12)
        assert equilibrium_target_residual(Z, w) <= 1e-12

    def test_from_equilibrium_cycle(self, cycle3):
        w = stationary_distribution(cycle3)
        Z = fundamental_matrix(cycle3, w)
        np.testing.assert_allclose(mean_time_from_equilibrium(Z, w), np.ones(3), rtol=1e-12)

    def test_harmonic_and_constancy_on_random_chains(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            P = random_chain(rng, int(rng.integers(2, 40)))
            w = stationary_distribution(P)
            Z = fundamental_matrix(P, w)
            M = mean_hitting_times(Z, w)
            report = mean_time_to_equilibrium(M, w)
            scale = max(1.0, report.kemeny)
            assert report.constancy_spread <= 1e-8 * scale
            assert harmonic_residual(P, M, w) <= 1e-8 * scale
            assert abs(kemeny_trace(Z) - report.kemeny) <= 1e-8 * scale
            assert constant_vector_residual(P) <= 1e-8

    def test_single_state_report(self, single_state):
        w = stationary_distribution(single_state)
        Z = fundamental_matrix(single_state, w)
        report = mean_time_to_equilibrium(mean_hitting_times(Z, w), w)
        assert report.kemeny == 0.0
        assert report.constancy_spread == 0.0
