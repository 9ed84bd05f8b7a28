"""Matrix types, the winrate->evaluation transform, and CSV serialization."""

import numpy as np
import pytest

from splab.metagame import (CrossWinrateMatrix, EvaluationMatrix,
                            MixedStrategy, WinrateMatrix, csv_to_matrix,
                            cross_winrate_to_evaluation, evaluation_to_winrate,
                            format_cell, matrix_to_csv, submatrix,
                            winrate_to_evaluation)


class TestMixedStrategy:
    def test_valid(self):
        s = MixedStrategy([0.25, 0.75])
        assert len(s) == 2
        assert s[1] == 0.75

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            MixedStrategy([1.1, -0.1])

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            MixedStrategy([0.5, 0.6])

    def test_support_snaps_tiny_entries(self):
        s = MixedStrategy([1.0 - 1e-12, 1e-12])
        snapped = s.support()
        assert snapped[1] == 0.0

    def test_immutable(self):
        s = MixedStrategy([0.5, 0.5])
        with pytest.raises(ValueError):
            s.probs[0] = 1.0


class TestWinrateMatrix:
    def test_trivial_1x1(self):
        m = WinrateMatrix([[0.5]])
        assert m.entries[0, 0] == 0.5
        assert m.n == 1

    def test_canonicalizes_mirror_exactly(self):
        m = WinrateMatrix([[0.5, 0.7], [0.3, 0.5]])
        assert m.entries[0, 1] + m.entries[1, 0] == 1.0
        assert m.entries[1, 1] == 0.5

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            WinrateMatrix([[0.5, 0.7], [0.4, 0.5]])

    def test_rejects_bad_diagonal(self):
        with pytest.raises(ValueError):
            WinrateMatrix([[0.6, 0.7], [0.3, 0.4]])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            WinrateMatrix([[0.5, 1.2], [-0.2, 0.5]])

    def test_random_matrices_satisfy_invariants(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1, 8))
            upper = rng.random((n, n))
            w = np.triu(upper, 1)
            w = w + np.tril(1 - w.T, -1)
            np.fill_diagonal(w, 0.5)
            m = WinrateMatrix(w, sims_per_entry=30)
            assert m.entries.min() >= 0 and m.entries.max() <= 1
            assert np.all(np.diag(m.entries) == 0.5)
            assert np.all(m.entries + m.entries.T == 1.0)


class TestEvaluationMatrix:
    def test_rejects_non_antisymmetric(self):
        with pytest.raises(ValueError):
            EvaluationMatrix([[0.0, 0.2], [0.2, 0.0]])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            EvaluationMatrix([[0.0, 0.6], [-0.6, 0.0]])

    def test_exact_antisymmetry_after_construction(self):
        a = EvaluationMatrix([[0.0, 0.2], [-0.2, 0.0]])
        assert np.all(a.entries + a.entries.T == 0.0)


class TestWinrateToEvaluation:
    def test_selfplay_diagonal(self):
        a = winrate_to_evaluation(WinrateMatrix([[0.5]]))
        assert a.entries[0, 0] == 0.0

    def test_elementwise_shift(self):
        a = winrate_to_evaluation(WinrateMatrix([[0.5, 1.0], [0.0, 0.5]]))
        assert np.allclose(a.entries, [[0.0, 0.5], [-0.5, 0.0]])

    def test_3x3_oracle(self):
        w = [[0.5, 0.7, 0.2], [0.3, 0.5, 0.9], [0.8, 0.1, 0.5]]
        expected = np.array(w) - 0.5  # independent elementwise-subtraction oracle
        a = winrate_to_evaluation(WinrateMatrix(w))
        assert np.allclose(a.entries, expected, atol=1e-15)
        assert np.allclose(
            a.entries, [[0, 0.2, -0.3], [-0.2, 0, 0.4], [0.3, -0.4, 0]])

    def test_antisymmetry_within_tolerance(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            w = np.triu(rng.random((n, n)), 1)
            w = w + np.tril(1 - w.T, -1)
            np.fill_diagonal(w, 0.5)
            a = winrate_to_evaluation(WinrateMatrix(w))
            assert np.abs(a.entries + a.entries.T).max() <= 1e-12

    def test_round_trip(self):
        rng = np.random.default_rng(2)
        w = np.triu(rng.integers(0, 10**6 + 1, size=(6, 6)) / 10**6, 1)
        w = w + np.tril(1 - w.T, -1)
        np.fill_diagonal(w, 0.5)
        m = WinrateMatrix(w)
        back = evaluation_to_winrate(winrate_to_evaluation(m))
        assert np.abs(back.entries - m.entries).max() <= 1e-12
        # 6-decimal serialization survives the round trip bit-for-bit
        assert matrix_to_csv(back.entries, m.labels, m.labels) == \
            matrix_to_csv(m.entries, m.labels, m.labels)


class TestSubmatrix:
    A = EvaluationMatrix([[0, 0.2, -0.3], [-0.2, 0, 0.4], [0.3, -0.4, 0]])

    def test_identity_case(self):
        assert np.array_equal(submatrix(self.A, 3).entries, self.A.entries)

    def test_k1(self):
        assert submatrix(self.A, 1).entries == np.array([[0.0]])

    def test_k2_slicing_oracle(self):
        expected = np.array(self.A.entries)[:2, :2]  # independent index-slicing
        assert np.array_equal(submatrix(self.A, 2).entries, expected)
        assert np.allclose(submatrix(self.A, 2).entries, [[0, 0.2], [-0.2, 0]])

    def test_composition(self):
        rng = np.random.default_rng(3)
        b = rng.normal(size=(6, 6)) * 0.2
        a = EvaluationMatrix((b - b.T) / 2)
        for k in range(1, 7):
            for m in range(1, k + 1):
                lhs = submatrix(submatrix(a, k), m).entries
                rhs = submatrix(a, m).entries
                assert np.array_equal(lhs, rhs)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            submatrix(self.A, 0)
        with pytest.raises(ValueError):
            submatrix(self.A, 4)


class TestCrossMatrices:
    def test_range_only(self):
        m = CrossWinrateMatrix([[0.0, 1.0, 0.4]])
        assert m.shape == (1, 3)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            CrossWinrateMatrix([[1.5]])

    def test_cross_evaluation(self):
        m = CrossWinrateMatrix([[0.7, 0.2], [0.5, 1.0]])
        a = cross_winrate_to_evaluation(m)
        assert np.allclose(a, [[0.2, -0.3], [0.0, 0.5]])


class TestCsv:
    def test_format(self):
        text = matrix_to_csv(np.array([[0.5, 1 / 3], [2 / 3, 0.5]]),
                             ["a", "b"], ["a", "b"])
        assert text == ",a,b\na,0.500000,0.333333\nb,0.666667,0.500000\n"
        assert "\r" not in text

    def test_negative_zero_canonicalized(self):
        assert format_cell(-0.0) == "0.000000"
        assert format_cell(-1e-9) == "0.000000"

    def test_round_trip(self):
        entries = np.array([[0.5, 0.123456], [0.876544, 0.5]])
        text = matrix_to_csv(entries, ["x", "y"], ["x", "y"])
        back, rows, cols = csv_to_matrix(text)
        assert rows == ["x", "y"] and cols == ["x", "y"]
        assert np.allclose(back, entries, atol=5e-7)

    def test_rejects_unsafe_labels(self):
        with pytest.raises(ValueError):
            matrix_to_csv(np.zeros((1, 1)), ["a,b"], ["c"])
