"""Generalized self-play: a menagerie of frozen policies, a sampling
distribution choosing each episode's opponent, and a curator deciding what
enters and leaves the menagerie.

Four curation/sampling schemes are provided:

* ``naive`` — the opponent is always a fresh copy of the live policy.
* ``delta_uniform`` — uniform sampling over the most recent ``(1 - delta)``
  fraction of the policy history; a copy is frozen in after every episode.
* ``delta_limit_uniform`` — same window, but sampling weights equalize
  cumulative expected sample counts, cancelling the harmonic bias toward
  early policies that plain uniform sampling provably has.
* ``psro`` — opponents are drawn from the maxent-Nash meta-strategy over the
  menagerie's empirical winrate matrix; the live policy is admitted once its
  trailing winrate over ``n_matches`` episodes reaches ``w``.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .learner import TabularSoftmaxPolicy, snapshot
from .metagame import MixedStrategy, WinrateMatrix, winrate_to_evaluation
from .nash import maxent_nash
from .seeding import sample_index

#: match_runner(policy_a, policy_b, index_a, index_b) -> winrate of policy_a
MatchRunner = Callable[[TabularSoftmaxPolicy, TabularSoftmaxPolicy, int, int], float]


@dataclass
class MenagerieEntry:
    policy: TabularSoftmaxPolicy
    stamp: int  # episode after which the snapshot was frozen (0 = initial)


@dataclass
class Menagerie:
    """Ordered snapshots plus a handle to the live training policy."""

    live_policy: TabularSoftmaxPolicy
    entries: list[MenagerieEntry] = field(default_factory=list)
    history_count: int = 0  # total snapshots ever admitted, kept or not

    def __post_init__(self) -> None:
        if not self.entries:
            self.entries = [MenagerieEntry(snapshot(self.live_policy), 0)]
            self.history_count = 1

    def __len__(self) -> int:
        return len(self.entries)

    def stamps(self) -> list[int]:
        return [e.stamp for e in self.entries]

    def append(self, policy: TabularSoftmaxPolicy, stamp: int) -> MenagerieEntry:
        if self.entries and stamp <= self.entries[-1].stamp:
            raise ValueError(
                f"insertion stamps must strictly increase "
                f"({stamp} after {self.entries[-1].stamp})")
        entry = MenagerieEntry(snapshot(policy), stamp)
        self.entries.append(entry)
        self.history_count += 1
        return entry


def _window_target(delta: float, history_count: int) -> int:
    """Entries to keep: the newest ceil((1-delta) * history) but at least 1."""
    return max(1, math.ceil((1.0 - delta) * history_count))


@dataclass
class NaiveScheme:
    """Opponent = exact copy of the live policy; menagerie holds just that."""

    name: str = field(default="naive", init=False)

    def sample(self, menagerie: Menagerie, rng: np.random.Generator) -> MenagerieEntry:
        assert menagerie.entries, "menagerie can never be empty"
        return menagerie.entries[-1]

    def curate(self, menagerie: Menagerie, live: TabularSoftmaxPolicy,
               episode: int, won: bool | None = None) -> Menagerie:
        menagerie.entries.clear()
        menagerie.append(live, episode)
        return menagerie


@dataclass
class DeltaUniformScheme:
    """Uniform sampling over the newest (1 - delta) fraction of history."""

    delta: float = 0.0
    name: str = field(default="delta_uniform", init=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")

    def sample(self, menagerie: Menagerie, rng: np.random.Generator) -> MenagerieEntry:
        assert menagerie.entries, "menagerie can never be empty"
        return menagerie.entries[int(rng.integers(0, len(menagerie.entries)))]

    def curate(self, menagerie: Menagerie, live: TabularSoftmaxPolicy,
               episode: int, won: bool | None = None) -> Menagerie:
        menagerie.append(live, episode)
        target = _window_target(self.delta, menagerie.history_count)
        while len(menagerie.entries) > target:
            menagerie.entries.pop(0)
        return menagerie


@dataclass
class DeltaLimitUniformScheme:
    """Window sampling with weights that equalize cumulative sample counts.

    Each entry carries a cumulative *expected* sample count c_i (updated by
    the sampling probabilities themselves, so the bookkeeping is
    deterministic); weights are ``max(0, max_j c_j - c_i) + epsilon``.  New
    entries start at zero and therefore absorb nearly all probability until
    they catch up with the pack.
    """

    delta: float = 0.0
    epsilon: float = 1e-6
    name: str = field(default="delta_limit_uniform", init=False)
    _counts: dict[int, float] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")

    def weights(self, menagerie: Menagerie) -> np.ndarray:
        c = np.array([self._counts.get(e.stamp, 0.0) for e in menagerie.entries])
        w = np.maximum(0.0, c.max() - c) + self.epsilon
        return w / w.sum()

    def sample(self, menagerie: Menagerie, rng: np.random.Generator) -> MenagerieEntry:
        assert menagerie.entries, "menagerie can never be empty"
        probs = self.weights(menagerie)
        idx = sample_index(rng, probs)
        for entry, p in zip(menagerie.entries, probs):
            self._counts[entry.stamp] = self._counts.get(entry.stamp, 0.0) + p
        return menagerie.entries[idx]

    def curate(self, menagerie: Menagerie, live: TabularSoftmaxPolicy,
               episode: int, won: bool | None = None) -> Menagerie:
        menagerie.append(live, episode)
        target = _window_target(self.delta, menagerie.history_count)
        while len(menagerie.entries) > target:
            dropped = menagerie.entries.pop(0)
            self._counts.pop(dropped.stamp, None)
        return menagerie


@dataclass
class MetaGameState:
    """PSRO bookkeeping: meta-game matrix, meta-strategy, gate, timers."""

    winrates: np.ndarray = field(default_factory=lambda: np.array([[0.5]]))
    meta_strategy: MixedStrategy = field(default_factory=lambda: MixedStrategy([1.0]))
    recent_outcomes: deque = field(default_factory=deque)
    solver_seconds: float = 0.0  # cumulative meta-solver (M) time
    matrix_seconds: float = 0.0  # cumulative winrate-matrix update (W) time


@dataclass
class PsroScheme:
    """Policy-space response oracle with a trailing-winrate admission gate."""

    w: float = 0.72
    n_matches: int = 50
    match_runner: MatchRunner | None = None
    sims_per_entry: int = 30
    name: str = field(default="psro", init=False)
    state: MetaGameState = field(default_factory=MetaGameState, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.w <= 1.0:
            raise ValueError("winrate threshold w must lie in [0, 1]")
        if self.n_matches < 1:
            raise ValueError("n_matches must be >= 1")
        self.state.recent_outcomes = deque(maxlen=self.n_matches)

    def sample(self, menagerie: Menagerie, rng: np.random.Generator) -> MenagerieEntry:
        assert menagerie.entries, "menagerie can never be empty"
        assert len(self.state.meta_strategy) == len(menagerie.entries), \
            "meta-strategy out of sync with menagerie"
        idx = sample_index(rng, self.state.meta_strategy.probs)
        return menagerie.entries[idx]

    def curate(self, menagerie: Menagerie, live: TabularSoftmaxPolicy,
               episode: int, won: bool | None = None) -> Menagerie:
        if won is None:
            raise ValueError("psro curation needs the episode outcome")
        buf = self.state.recent_outcomes
        buf.append(bool(won))
        if len(buf) < self.n_matches:
            return menagerie
        if sum(buf) / self.n_matches >= self.w:
            if self.match_runner is None:
                raise ValueError("psro needs a match_runner to extend the meta-game")
            menagerie.append(live, episode)
            buf.clear()
            psro_meta_step(self.state, menagerie, self.match_runner)
        return menagerie


def psro_meta_step(state: MetaGameState, menagerie: Menagerie,
                   match_runner: MatchRunner) -> MetaGameState:
    """Extend the meta-game with the newest policy and re-solve it.

    The new row/column is filled by `match_runner` per unordered pair (the
    mirrored entry follows analytically); the meta-strategy is the maxent
    Nash of the evaluation matrix.  Both phases accumulate wall time into
    the matrix (W) and solver (M) timers.
    """
    k = len(menagerie.entries)
    old = state.winrates

    t0 = time.perf_counter()
    grown = np.full((k, k), 0.5)
    grown[: k - 1, : k - 1] = old
    new = menagerie.entries[-1].policy
    for i in range(k - 1):
        w_new_i = match_runner(new, menagerie.entries[i].policy, k - 1, i)
        grown[k - 1, i] = w_new_i
        grown[i, k - 1] = 1.0 - w_new_i
    state.matrix_seconds += time.perf_counter() - t0

    t0 = time.perf_counter()
    matrix = WinrateMatrix(grown, labels=[str(e.stamp) for e in menagerie.entries])
    solution = maxent_nash(winrate_to_evaluation(matrix))
    state.solver_seconds += time.perf_counter() - t0

    state.winrates = matrix.entries
    state.meta_strategy = solution.strategy
    assert state.winrates.shape[0] == len(menagerie.entries)
    return state


SelfPlayScheme = NaiveScheme | DeltaUniformScheme | DeltaLimitUniformScheme | PsroScheme


def sample_opponents(scheme: SelfPlayScheme, menagerie: Menagerie,
                     rng: np.random.Generator, count: int = 1) -> list[MenagerieEntry]:
    """Draw opponent snapshots for the next episode (one for 2-player play)."""
    return [scheme.sample(menagerie, rng) for _ in range(count)]


def curate(scheme: SelfPlayScheme, menagerie: Menagerie,
           live: TabularSoftmaxPolicy, episode: int,
           won: bool | None = None) -> Menagerie:
    """End-of-episode menagerie maintenance for any scheme."""
    return scheme.curate(menagerie, live, episode, won)


def expected_sample_counts_delta0(i: int, n: int) -> float:
    """Harmonic tail S_i = sum_{k=i}^{n} 1/k.

    Under delta=0 uniform sampling with one insertion per episode, policy i
    (1-based by insertion order) is sampled 1/e of the time at episode e >= i,
    so its expected total sample count over n episodes is S_i — strictly
    decreasing in i, the bias toward early policies.
    """
    if not 1 <= i <= n:
        raise ValueError(f"index {i} out of range 1..{n}")
    return float(sum(1.0 / k for k in range(i, n + 1)))


def harmonic_tail_series(n: int) -> np.ndarray:
    """S_1..S_n as a vector (reverse cumulative sum of 1/k)."""
    inv = 1.0 / np.arange(1, n + 1)
    return inv[::-1].cumsum()[::-1]


def scheme_from_name(name: str, *, delta: float = 0.0, w: float = 0.72,
                     n_matches: int = 50, sims_per_entry: int = 30,
                     match_runner: MatchRunner | None = None) -> SelfPlayScheme:
    """Factory used by config parsing."""
    if name == "naive":
        return NaiveScheme()
    if name == "delta_uniform":
        return DeltaUniformScheme(delta=delta)
    if name == "delta_limit_uniform":
        return DeltaLimitUniformScheme(delta=delta)
    if name == "psro":
        return PsroScheme(w=w, n_matches=n_matches, match_runner=match_runner,
                          sims_per_entry=sims_per_entry)
    raise ValueError(f"unknown self-play scheme: {name!r}")
