"""Tabular softmax policy trained by REINFORCE with a moving-average baseline.

The policy keeps one logit row per recall state; action probabilities are
the softmax of that row (temperature 1).  Updates follow the episodic
policy gradient: for each visited (state, action) the chosen logit moves by
``lr * (G_t - baseline) * (1 - p)`` and the others by ``-lr * (G_t -
baseline) * p``, which is exactly the log-softmax gradient.  The baseline is
an exponential moving average of episode returns, updated after each
episode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .ioutil import atomic_write_text
from .rirrps import state_count

N_ACTIONS = 3


@dataclass(frozen=True)
class LearnerConfig:
    learning_rate: float = 0.05
    discount: float = 0.99
    baseline_decay: float = 0.9

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError("discount must lie in [0, 1]")
        if not 0.0 <= self.baseline_decay < 1.0:
            raise ValueError("baseline_decay must lie in [0, 1)")


@dataclass
class TabularSoftmaxPolicy:
    """Logit table of shape (n_states, 3); zero logits = uniform play."""

    logits: np.ndarray

    def __init__(self, n_states: int | None = None,
                 logits: np.ndarray | None = None) -> None:
        if logits is not None:
            table = np.array(logits, dtype=float)
            if table.ndim != 2 or table.shape[1] != N_ACTIONS:
                raise ValueError(f"logits must be (n_states, 3), got {table.shape}")
        else:
            if n_states is None:
                n_states = state_count(3)
            table = np.zeros((n_states, N_ACTIONS))
        self.logits = table

    @property
    def n_states(self) -> int:
        return self.logits.shape[0]

    def probs(self, state: int) -> tuple[float, float, float]:
        """Softmax of the state's logits (plain floats for speed)."""
        row = self.logits[state]
        l0, l1, l2 = float(row[0]), float(row[1]), float(row[2])
        m = max(l0, l1, l2)
        e0, e1, e2 = math.exp(l0 - m), math.exp(l1 - m), math.exp(l2 - m)
        s = e0 + e1 + e2
        return e0 / s, e1 / s, e2 / s

    def act(self, state: int, rng: np.random.Generator) -> int:
        """Sample an action by inverse CDF on a single uniform draw."""
        p0, p1, _ = self.probs(state)
        u = rng.random()
        if u < p0:
            return 0
        if u < p0 + p1:
            return 1
        return 2

    def copy(self) -> "TabularSoftmaxPolicy":
        return TabularSoftmaxPolicy(logits=self.logits.copy())

    def save(self, path: Path | str) -> None:
        """Text format, one line per state: index then three repr() logits."""
        lines = []
        for s in range(self.n_states):
            row = self.logits[s]
            lines.append(f"{s} {float(row[0])!r} {float(row[1])!r} {float(row[2])!r}")
        atomic_write_text(path, "\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: Path | str) -> "TabularSoftmaxPolicy":
        text = Path(path).read_text(encoding="utf-8")
        rows: dict[int, tuple[float, float, float]] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            idx, l0, l1, l2 = line.split()
            rows[int(idx)] = (float(l0), float(l1), float(l2))
        n = max(rows) + 1 if rows else 0
        if sorted(rows) != list(range(n)):
            raise ValueError(f"snapshot file is missing states: {path}")
        table = np.array([rows[s] for s in range(n)], dtype=float)
        return cls(logits=table)


def snapshot(policy: TabularSoftmaxPolicy) -> TabularSoftmaxPolicy:
    """Frozen deep copy, immune to later updates of the live policy."""
    return policy.copy()


def restore(snap: TabularSoftmaxPolicy) -> TabularSoftmaxPolicy:
    """Fresh live policy from a snapshot (again a deep copy)."""
    return snap.copy()


def discounted_returns(rewards: Sequence[float], discount: float) -> list[float]:
    """G_t for every step of one episode."""
    out = [0.0] * len(rewards)
    g = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        g = rewards[t] + discount * g
        out[t] = g
    return out


@dataclass
class ReinforceLearner:
    """Owns the live policy plus the baseline state across episodes."""

    policy: TabularSoftmaxPolicy
    config: LearnerConfig = field(default_factory=LearnerConfig)
    baseline: float = 0.0

    def update(self, trajectory: Sequence[tuple[int, int, float]]) -> None:
        """One REINFORCE step from a finished episode.

        ``trajectory`` holds (state, action, reward) for the learning seat in
        round order.  Steps are applied in order against the current table,
        so later steps see earlier steps' probability shifts.
        """
        if not trajectory:
            return
        rewards = [r for _, _, r in trajectory]
        returns = discounted_returns(rewards, self.config.discount)
        lr = self.config.learning_rate
        logits = self.policy.logits
        for (state, action, _), g in zip(trajectory, returns):
            if not 0 <= action < N_ACTIONS:
                raise ValueError(f"action {action} out of range")
            adv = g - self.baseline
            p = self.policy.probs(state)
            for a in range(N_ACTIONS):
                if a == action:
                    logits[state, a] += lr * adv * (1.0 - p[a])
                else:
                    logits[state, a] -= lr * adv * p[a]
        decay = self.config.baseline_decay
        self.baseline = decay * self.baseline + (1.0 - decay) * returns[0]
