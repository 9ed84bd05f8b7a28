"""Tabular softmax policy, REINFORCE updates, snapshots."""

import math

import numpy as np
import pytest

from splab.learner import (LearnerConfig, ReinforceLearner,
                           TabularSoftmaxPolicy, discounted_returns, restore,
                           snapshot)
from splab.rirrps import FixedAgent, RirRpsConfig, decide_winner, play_episode
from splab.seeding import rng_for


class TestPolicy:
    def test_zero_logits_uniform(self):
        policy = TabularSoftmaxPolicy(n_states=4)
        assert policy.probs(0) == (1 / 3, 1 / 3, 1 / 3)

    def test_default_size_is_recall3_table(self):
        assert TabularSoftmaxPolicy().n_states == 820

    def test_normalization_after_random_updates(self):
        rng = np.random.default_rng(30)
        policy = TabularSoftmaxPolicy(n_states=10)
        learner = ReinforceLearner(policy)
        for _ in range(200):
            traj = [(int(rng.integers(0, 10)), int(rng.integers(0, 3)),
                     float(rng.normal())) for _ in range(5)]
            learner.update(traj)
        for s in range(10):
            p = policy.probs(s)
            assert abs(sum(p) - 1.0) <= 1e-9
            assert all(v > 0 for v in p)

    def test_act_uniform_frequencies(self):
        policy = TabularSoftmaxPolicy(n_states=1)
        rng = np.random.default_rng(31)
        n = 10**5
        counts = np.bincount([policy.act(0, rng) for _ in range(n)], minlength=3)
        sigma = math.sqrt(n * (1 / 3) * (2 / 3))
        assert np.abs(counts - n / 3).max() <= 3 * sigma

    def test_act_skewed_logits(self):
        policy = TabularSoftmaxPolicy(logits=np.array([[10.0, -10.0, -10.0]]))
        rng = np.random.default_rng(32)
        n = 10**4
        freq0 = sum(policy.act(0, rng) == 0 for _ in range(n)) / n
        assert freq0 > 0.999

    def test_act_deterministic_given_seed(self):
        policy = TabularSoftmaxPolicy(n_states=2)
        seq1 = [policy.act(0, rng_for(5, 6)) for _ in range(10)]
        seq2 = [policy.act(0, rng_for(5, 6)) for _ in range(10)]
        assert seq1 == seq2

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            TabularSoftmaxPolicy(logits=np.zeros((4, 2)))


class TestConfig:
    def test_defaults(self):
        cfg = LearnerConfig()
        assert cfg.learning_rate == 0.05
        assert cfg.discount == 0.99
        assert cfg.baseline_decay == 0.9

    def test_validation(self):
        with pytest.raises(ValueError):
            LearnerConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            LearnerConfig(discount=1.5)
        with pytest.raises(ValueError):
            LearnerConfig(baseline_decay=1.0)


class TestReturns:
    def test_discounted_returns(self):
        got = discounted_returns([1.0, 0.0, -1.0], 0.5)
        assert got == [1.0 + 0.0 - 0.25, 0.0 - 0.5, -1.0]


class TestUpdate:
    def test_zero_advantage_is_noop(self):
        policy = TabularSoftmaxPolicy(n_states=3)
        learner = ReinforceLearner(policy)
        before = policy.logits.copy()
        learner.update([(0, 1, 0.0), (2, 0, 0.0)])
        assert np.array_equal(policy.logits, before)

    def test_positive_reward_increases_chosen_probability(self):
        policy = TabularSoftmaxPolicy(n_states=1)
        learner = ReinforceLearner(policy)
        p_before = policy.probs(0)[2]
        learner.update([(0, 2, 1.0)])
        assert policy.probs(0)[2] > p_before

    def test_gradient_matches_finite_differences(self):
        # the update direction must equal lr * adv * d(log p(a|s))/d(logits)
        rng = np.random.default_rng(33)
        h = 1e-5
        worst = 0.0
        for _ in range(50):
            logits = rng.normal(scale=2.0, size=(1, 3))
            action = int(rng.integers(0, 3))
            policy = TabularSoftmaxPolicy(logits=logits.copy())
            learner = ReinforceLearner(
                policy, LearnerConfig(learning_rate=1.0, discount=0.99,
                                      baseline_decay=0.9))
            learner.update([(0, action, 1.0)])  # adv = 1, single step
            analytic = policy.logits[0] - logits[0]

            def log_prob(vec):
                m = vec.max()
                z = np.exp(vec - m)
                return float(vec[action] - m - np.log(z.sum()))

            numeric = np.zeros(3)
            for k in range(3):
                up, down = logits[0].copy(), logits[0].copy()
                up[k] += h
                down[k] -= h
                numeric[k] = (log_prob(up) - log_prob(down)) / (2 * h)
            worst = max(worst, np.abs(analytic - numeric).max())
        assert worst <= 1e-6

    def test_baseline_moves_toward_episode_return(self):
        policy = TabularSoftmaxPolicy(n_states=1)
        learner = ReinforceLearner(policy)
        learner.update([(0, 0, 1.0)])
        assert learner.baseline == pytest.approx(0.1)  # 0.9*0 + 0.1*1

    def test_updates_applied_in_round_order(self):
        # a later visit to the same state must see the earlier shift
        policy = TabularSoftmaxPolicy(n_states=1)
        learner = ReinforceLearner(policy, LearnerConfig(learning_rate=0.5))
        learner.update([(0, 0, 1.0), (0, 0, 1.0)])
        seq = policy.logits.copy()

        policy2 = TabularSoftmaxPolicy(n_states=1)
        learner2 = ReinforceLearner(policy2, LearnerConfig(learning_rate=0.5))
        g = discounted_returns([1.0, 1.0], 0.99)
        p = policy2.probs(0)
        for t in range(2):
            pt = policy2.probs(0)
            for a in range(3):
                grad = (1.0 - pt[a]) if a == 0 else -pt[a]
                policy2.logits[0, a] += 0.5 * g[t] * grad
        assert np.allclose(seq, policy2.logits)

    def test_rejects_bad_action(self):
        learner = ReinforceLearner(TabularSoftmaxPolicy(n_states=1))
        with pytest.raises(ValueError):
            learner.update([(0, 5, 1.0)])


class TestSnapshots:
    def test_snapshot_isolated_from_mutation(self):
        policy = TabularSoftmaxPolicy(n_states=2)
        frozen = snapshot(policy)
        policy.logits[0, 0] = 99.0
        assert frozen.logits[0, 0] == 0.0

    def test_restore_behaves_identically(self):
        rng = np.random.default_rng(34)
        policy = TabularSoftmaxPolicy(logits=rng.normal(size=(5, 3)))
        clone = restore(snapshot(policy))
        for s in range(5):
            acts1 = [policy.act(s, rng_for(40, s, i)) for i in range(20)]
            acts2 = [clone.act(s, rng_for(40, s, i)) for i in range(20)]
            assert acts1 == acts2

    def test_file_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(35)
        logits = rng.normal(size=(8, 3)) * 10.0 ** rng.integers(
            -12, 12, size=(8, 3)).astype(float)
        policy = TabularSoftmaxPolicy(logits=logits)
        path = tmp_path / "p.policy"
        policy.save(path)
        loaded = TabularSoftmaxPolicy.load(path)
        assert np.array_equal(loaded.logits, policy.logits)
        # and saving the loaded copy reproduces the file bytes
        path2 = tmp_path / "p2.policy"
        loaded.save(path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_load_rejects_missing_states(self, tmp_path):
        path = tmp_path / "bad.policy"
        path.write_text("0 0.0 0.0 0.0\n2 0.0 0.0 0.0\n")
        with pytest.raises(ValueError):
            TabularSoftmaxPolicy.load(path)


class TestLearningSanity:
    def test_beats_rock_after_training(self):
        env = RirRpsConfig()
        policy = TabularSoftmaxPolicy()
        learner = ReinforceLearner(policy)
        rock = FixedAgent("rock")
        for episode in range(1, 2001):
            rng = rng_for(77, episode)
            result = play_episode(policy, rock, env, rng)
            traj = [(s1, a1, r) for (s1, _), (a1, _), r in
                    zip(result.states, result.joint_actions, result.rewards1)]
            learner.update(traj)
        wins = 0
        n_eval = 400
        for episode in range(n_eval):
            rng = rng_for(78, episode)
            result = play_episode(policy, rock, env, rng)
            wins += decide_winner(result, rng) == 0
        assert wins / n_eval >= 0.95
