"""Relative population performance and its evolution."""

import numpy as np
import pytest

from splab.population import (relative_population_performance, rpp_evolution,
                              solve_zero_sum)


def random_rect(rng, m, k):
    return rng.uniform(-0.5, 0.5, size=(m, k))


class TestRpp:
    def test_single_option(self):
        res = relative_population_performance([[0.3]])
        assert abs(res.value - 0.3) <= 1e-9
        assert res.nash_row.probs.tolist() == [1.0]
        assert res.nash_col.probs.tolist() == [1.0]

    def test_constant_matrix(self):
        res = relative_population_performance([[0.2, 0.2], [0.2, 0.2]])
        assert abs(res.value - 0.2) <= 1e-9

    def test_antisymmetric_self_comparison_is_zero(self):
        rng = np.random.default_rng(20)
        for n in (1, 3, 8):
            b = rng.uniform(-0.5, 0.5, size=(n, n))
            a = (b - b.T) / 2
            assert abs(relative_population_performance(a).value) <= 1e-9

    def test_value_equals_bilinear_form(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            a = random_rect(rng, int(rng.integers(1, 7)), int(rng.integers(1, 7)))
            res = relative_population_performance(a)
            bilinear = res.nash_row.probs @ a @ res.nash_col.probs
            assert abs(res.value - bilinear) <= 1e-9

    def test_swap_duality(self):
        rng = np.random.default_rng(22)
        for _ in range(30):
            a = random_rect(rng, int(rng.integers(1, 7)), int(rng.integers(1, 7)))
            v = relative_population_performance(a).value
            v_swapped = relative_population_performance(-a.T).value
            assert abs(v + v_swapped) <= 2e-6

    def test_value_bracketing(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            a = random_rect(rng, int(rng.integers(1, 6)), int(rng.integers(1, 6)))
            v = relative_population_performance(a).value
            assert a.min() - 1e-9 <= v <= a.max() + 1e-9

    def test_equilibrium_quality(self):
        # neither meta-player can deviate profitably from the returned pair
        rng = np.random.default_rng(24)
        for _ in range(20):
            a = random_rect(rng, 4, 5)
            res = relative_population_performance(a)
            row_payoffs = a @ res.nash_col.probs
            col_payoffs = res.nash_row.probs @ a
            assert row_payoffs.max() <= res.value + 1e-8
            assert col_payoffs.min() >= res.value - 1e-8

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            relative_population_performance([[0.7]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            relative_population_performance(np.zeros((0, 3)))


class TestSolveZeroSum:
    def test_matching_pennies_value_zero(self):
        a = np.array([[0.5, -0.5], [-0.5, 0.5]])
        x, y, v = solve_zero_sum(a)
        assert abs(v) <= 1e-9
        assert np.abs(x - 0.5).max() <= 1e-9
        assert np.abs(y - 0.5).max() <= 1e-9


class TestRppEvolution:
    def test_identical_populations_all_zero(self):
        rng = np.random.default_rng(25)
        b = rng.uniform(-0.5, 0.5, size=(10, 10))
        a = (b - b.T) / 2
        assert np.abs(rpp_evolution(a)).max() <= 1e-6

    def test_last_element_is_full_matrix_value(self):
        rng = np.random.default_rng(26)
        a = random_rect(rng, 6, 6)
        values = rpp_evolution(a)
        assert abs(values[-1] - relative_population_performance(a).value) <= 1e-12

    def test_matches_per_submatrix_recompute(self):
        rng = np.random.default_rng(27)
        a = random_rect(rng, 3, 3)
        values = rpp_evolution(a)
        for i in range(1, 4):
            fresh = relative_population_performance(a[:i, :i].copy()).value
            assert abs(values[i - 1] - fresh) <= 1e-12

    def test_depends_only_on_leading_block(self):
        rng = np.random.default_rng(28)
        a = random_rect(rng, 5, 5)
        base = rpp_evolution(a)
        perturbed = a.copy()
        perturbed[4, :] = rng.uniform(-0.5, 0.5, size=5)
        perturbed[:, 4] = rng.uniform(-0.5, 0.5, size=5)
        assert np.array_equal(rpp_evolution(perturbed)[:4], base[:4])

    def test_rejects_rectangular(self):
        with pytest.raises(ValueError):
            rpp_evolution(np.zeros((3, 4)))
