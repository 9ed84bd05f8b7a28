"""Relative population performance between two checkpoint populations.

The cross-population evaluation matrix A (rows = population 1, columns =
population 2, entries in [-1/2, 1/2]) defines a zero-sum matrix game between
two meta-players choosing policies.  Its value v is the relative population
performance: positive means population 1 wins on average at equilibrium.
The evolution variant slices leading principal blocks of a single estimated
matrix, giving v as both populations grow checkpoint by checkpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .metagame import MixedStrategy
from .nash import NashSolverError

_RANGE_TOL = 1e-9


@dataclass(frozen=True)
class RppResult:
    """Game value plus the equilibrium meta-strategies that certify it."""

    value: float
    nash_row: MixedStrategy
    nash_col: MixedStrategy


def _as_rect_evaluation(a) -> np.ndarray:
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {m.shape}")
    if np.abs(m).max() > 0.5 + _RANGE_TOL:
        raise ValueError("evaluation entries must lie in [-1/2, 1/2]")
    return m


def solve_zero_sum(a) -> tuple[np.ndarray, np.ndarray, float]:
    """Equilibrium (x, y) and value of the zero-sum game with payoff ``a``.

    Solved as the standard pair of linear programs (row player maximizes the
    guaranteed payoff, column player minimizes the ceded payoff); the value
    is unique even when the strategies are not.
    """
    A = np.array(a, dtype=float)
    m, k = A.shape
    # row player: max v  s.t.  (A^T x)_j >= v, x in simplex
    c = np.zeros(m + 1)
    c[-1] = -1.0
    row = linprog(c,
                  A_ub=np.hstack([-A.T, np.ones((k, 1))]), b_ub=np.zeros(k),
                  A_eq=np.concatenate([np.ones(m), [0.0]]).reshape(1, -1),
                  b_eq=[1.0],
                  bounds=[(0, None)] * m + [(None, None)], method="highs")
    # column player: min u  s.t.  (A y)_i <= u, y in simplex
    c = np.zeros(k + 1)
    c[-1] = 1.0
    col = linprog(c,
                  A_ub=np.hstack([A, -np.ones((m, 1))]), b_ub=np.zeros(m),
                  A_eq=np.concatenate([np.ones(k), [0.0]]).reshape(1, -1),
                  b_eq=[1.0],
                  bounds=[(0, None)] * k + [(None, None)], method="highs")
    if row.status != 0 or col.status != 0:
        raise NashSolverError(
            f"zero-sum LP failed (row status {row.status}, col status "
            f"{col.status}) on a {m}x{k} game")
    x = np.clip(row.x[:m], 0.0, None)
    x = x / x.sum()
    y = np.clip(col.x[:k], 0.0, None)
    y = y / y.sum()
    return x, y, float(x @ A @ y)


def relative_population_performance(a) -> RppResult:
    """Value of the cross-population game; positive favors population 1."""
    A = _as_rect_evaluation(a)
    x, y, v = solve_zero_sum(A)
    return RppResult(v, MixedStrategy(x), MixedStrategy(y))


def rpp_evolution(a) -> np.ndarray:
    """Relative population performance of every leading principal block.

    Requires a square matrix (equal checkpoint counts from both runs);
    element i-1 is the value over the first i checkpoints of each
    population, all sliced from the one matrix passed in.
    """
    A = _as_rect_evaluation(a)
    n, m = A.shape
    if n != m:
        raise ValueError(f"rpp_evolution needs equal population sizes, got {A.shape}")
    out = np.empty(n)
    for i in range(1, n + 1):
        try:
            out[i - 1] = relative_population_performance(A[:i, :i]).value
        except NashSolverError as exc:
            raise NashSolverError(f"leading block {i}: {exc}") from exc
    return out
