"""Repeated imperfect-recall rock-paper-scissors.

Two players throw simultaneously for a fixed number of repetitions; each
observes only the last ``recall`` joint actions, expressed from its own
perspective (own action first), which keeps the game symmetric between
seats.  The episode winner is the player with the higher cumulative round
reward, ties broken by a fair coin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Protocol

import numpy as np

from .seeding import sample_index

ROCK, PAPER, SCISSORS = 0, 1, 2
ACTIONS = (ROCK, PAPER, SCISSORS)
ACTION_NAMES = ("rock", "paper", "scissors")


@dataclass(frozen=True)
class RirRpsConfig:
    repetitions: int = 10
    recall: int = 3

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.recall < 0:
            raise ValueError("recall must be >= 0")


def round_reward(a1: int, a2: int) -> tuple[int, int]:
    """Single-round payoff: winner +1, loser -1, draw 0/0."""
    d = (a1 - a2) % 3
    if d == 0:
        return 0, 0
    return (1, -1) if d == 1 else (-1, 1)


def joint_index(own: int, opp: int) -> int:
    """Encode a joint action from one seat's perspective as 0..8."""
    return own * 3 + opp


def joint_pair(index: int) -> tuple[int, int]:
    """Decode a joint-action index back to (own, opp)."""
    return index // 3, index % 3


@lru_cache(maxsize=None)
def state_offsets(recall: int) -> tuple[int, ...]:
    """Start index of each window length's block in the state enumeration."""
    offs = [0]
    for length in range(recall + 1):
        offs.append(offs[-1] + 9 ** length)
    return tuple(offs)


def state_count(recall: int) -> int:
    """Number of recall states: sum of 9^l for l = 0..recall (820 at recall 3)."""
    return state_offsets(recall)[-1]


def state_index(window: tuple[int, ...], recall: int) -> int:
    """Index of a window of joint actions (most recent last) in 0..count-1."""
    if len(window) > recall:
        raise ValueError(f"window longer than recall {recall}")
    v = 0
    for j in window:
        if not 0 <= j <= 8:
            raise ValueError(f"joint action index {j} out of range")
        v = v * 9 + j
    return state_offsets(recall)[len(window)] + v


def enumerate_states(recall: int) -> list[tuple[int, ...]]:
    """All windows of length 0..recall, ordered by state_index."""
    states: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(recall):
        frontier = [w + (j,) for w in frontier for j in range(9)]
        states.extend(frontier)
    return states


class Agent(Protocol):
    """Anything that maps a recall-state index to an action."""

    def act(self, state: int, rng: np.random.Generator) -> int: ...


@dataclass(frozen=True)
class FixedAgent:
    """Constant-action reference agents plus a uniformly random one."""

    kind: str  # "rock" | "paper" | "scissors" | "random"

    def __post_init__(self) -> None:
        if self.kind not in (*ACTION_NAMES, "random"):
            raise ValueError(f"unknown fixed agent kind: {self.kind!r}")

    def act(self, state: int, rng: np.random.Generator) -> int:
        if self.kind == "random":
            return int(rng.integers(0, 3))
        return ACTION_NAMES.index(self.kind)


@dataclass
class RirRps:
    """Environment instance tracking both seats' recall windows."""

    config: RirRpsConfig = field(default_factory=RirRpsConfig)

    def __post_init__(self) -> None:
        self.reset()

    def reset(self) -> tuple[int, int]:
        self._windows: tuple[tuple[int, ...], tuple[int, ...]] = ((), ())
        self._round = 0
        return self.observe()

    @property
    def done(self) -> bool:
        return self._round >= self.config.repetitions

    def window(self, seat: int) -> tuple[tuple[int, int], ...]:
        """Joint actions (own, opp) visible to a seat, most recent last."""
        return tuple(joint_pair(j) for j in self._windows[seat])

    def observe(self) -> tuple[int, int]:
        """Current state index for each seat."""
        r = self.config.recall
        return (state_index(self._windows[0], r), state_index(self._windows[1], r))

    def step(self, a1: int, a2: int) -> tuple[tuple[int, int], int, int, bool]:
        """Play one simultaneous round; returns (states, r1, r2, done)."""
        if self.done:
            raise RuntimeError("step() called on a finished episode")
        if a1 not in ACTIONS or a2 not in ACTIONS:
            raise ValueError(f"invalid actions ({a1}, {a2})")
        r1, r2 = round_reward(a1, a2)
        keep = self.config.recall
        if keep:
            w1 = (self._windows[0] + (joint_index(a1, a2),))[-keep:]
            w2 = (self._windows[1] + (joint_index(a2, a1),))[-keep:]
        else:
            w1 = w2 = ()
        self._windows = (w1, w2)
        self._round += 1
        return self.observe(), r1, r2, self.done


@dataclass(frozen=True)
class EpisodeResult:
    """Everything an episode produced, from seat 1's perspective first."""

    joint_actions: tuple[tuple[int, int], ...]
    states: tuple[tuple[int, int], ...]
    rewards1: tuple[int, ...]
    total1: int
    total2: int

    @property
    def joint_indices(self) -> tuple[int, ...]:
        """Per-round joint-action index a1*3 + a2 (trajectory export format)."""
        return tuple(a1 * 3 + a2 for a1, a2 in self.joint_actions)


def play_episode(agent1: Agent, agent2: Agent, config: RirRpsConfig,
                 rng: np.random.Generator) -> EpisodeResult:
    """Run one full episode; the rng drives both seats' action draws."""
    env = RirRps(config)
    joint: list[tuple[int, int]] = []
    states: list[tuple[int, int]] = []
    rewards1: list[int] = []
    total1 = total2 = 0
    while not env.done:
        s1, s2 = env.observe()
        a1 = agent1.act(s1, rng)
        a2 = agent2.act(s2, rng)
        _, r1, r2, _ = env.step(a1, a2)
        joint.append((a1, a2))
        states.append((s1, s2))
        rewards1.append(r1)
        total1 += r1
        total2 += r2
    return EpisodeResult(tuple(joint), tuple(states), tuple(rewards1),
                         total1, total2)


def decide_winner(result: EpisodeResult, rng: np.random.Generator) -> int:
    """0 if player 1 won, 1 if player 2 won; ties flip a fair coin."""
    if result.total1 > result.total2:
        return 0
    if result.total2 > result.total1:
        return 1
    return sample_index(rng, (0.5, 0.5))
