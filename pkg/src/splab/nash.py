"""Maximum-entropy Nash equilibria of antisymmetric zero-sum matrix games.

For an antisymmetric payoff matrix A the symmetric game value is 0 and the
equilibrium strategies form the polytope ``E = {x in simplex : max_j (Ax)_j
<= 0}`` — no pure deviation gains anything.  Among those this module finds
the (unique) equilibrium of maximal Shannon entropy.

Solver: the maxent program ``max H(x) s.t. x in E`` has the convex dual
``min_{y >= 0} logsumexp(Ay)`` with primal recovery ``x = softmax(Ay)``, so
after a short multiplicative-weights warm start we run a bound-constrained
quasi-Newton method on the dual.  A brute-force oracle for small matrices
cross-checks the solver by enumerating the vertices of E and maximizing
entropy over their convex hull.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .metagame import EvaluationMatrix, MixedStrategy

#: default residual tolerance (max payoff of any pure deviation)
DEFAULT_TOL = 1e-6

#: iteration budget across warm start and quasi-Newton restarts
DEFAULT_MAX_ITER = 10**6

_WARMSTART_STEPS = 100
_LBFGS_MAXITER = 20_000
_RESTARTS = 8

#: brute-force oracle size limit (vertex enumeration is combinatorial)
ORACLE_MAX_N = 6


class NashSolverError(RuntimeError):
    """Raised when the solver cannot certify an equilibrium within budget."""


@dataclass(frozen=True)
class NashSolution:
    """Solver output: strategy, its entropy (nats), certificate, work done."""

    strategy: MixedStrategy
    entropy: float
    residual: float
    iterations: int


def entropy(x) -> float:
    """Shannon entropy in nats; 0 log 0 = 0."""
    x = np.asarray(x, dtype=float)
    pos = x[x > 0]
    return float(-(pos * np.log(pos)).sum())


def _as_antisymmetric(a) -> np.ndarray:
    if isinstance(a, EvaluationMatrix):
        return np.asarray(a.entries, dtype=float)
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.abs(m + m.T).max() > 1e-9:
        raise ValueError("matrix is not antisymmetric")
    return m


def residual_of(a, x) -> float:
    """Best pure-deviation payoff against ``x``, clipped below at 0."""
    a = _as_antisymmetric(a)
    return max(0.0, float((a @ np.asarray(x, dtype=float)).max()))


def _softmax(v: np.ndarray) -> np.ndarray:
    z = np.exp(v - v.max())
    return z / z.sum()


def maxent_nash(a, tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER) -> NashSolution:
    """Maximum-entropy Nash equilibrium of an antisymmetric matrix game.

    Raises :class:`NashSolverError` if the deviation residual cannot be
    driven below ``tol`` within the iteration budget.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = _as_antisymmetric(a)
    n = A.shape[0]
    if n == 0:
        raise ValueError("empty game: n must be >= 1")
    if n == 1:
        return NashSolution(MixedStrategy([1.0]), 0.0, 0.0, 0)

    # Phase 1: multiplicative-weights averaging lands near the polytope and
    # gives the dual solver a sensible starting point.
    y = np.zeros(n)
    iterations = 0
    for t in range(1, _WARMSTART_STEPS + 1):
        x = _softmax(A @ y)
        y = np.maximum(0.0, y + (A @ x) / np.sqrt(t))
        iterations += 1

    def dual(yv: np.ndarray) -> tuple[float, np.ndarray]:
        u = A @ yv
        m = u.max()
        z = np.exp(u - m)
        s = z.sum()
        return m + np.log(s), A.T @ (z / s)

    # Phase 2: quasi-Newton descent on the dual; the gradient at y is -Ax for
    # x = softmax(Ay), so a small gradient certifies a small residual.
    target = min(tol, 1e-9)
    x = _softmax(A @ y)
    resid = max(0.0, float((A @ x).max()))
    for _ in range(_RESTARTS):
        if resid <= target or iterations >= max_iter:
            break
        steps = min(_LBFGS_MAXITER, max_iter - iterations)
        res = minimize(dual, y, jac=True, method="L-BFGS-B",
                       bounds=[(0.0, None)] * n,
                       options={"maxiter": steps, "ftol": 1e-18, "gtol": 1e-14})
        y = np.maximum(0.0, res.x)
        iterations += max(1, int(res.nit))
        x = _softmax(A @ y)
        resid = max(0.0, float((A @ x).max()))

    if resid > tol:
        raise NashSolverError(
            f"residual {resid:.3e} above tolerance {tol:.1e} "
            f"after {iterations} iterations (n={n})")
    # normalize, then re-certify so the stored residual matches the returned
    # strategy exactly (normalization moves it by at most a few ulp)
    x = x / x.sum()
    resid = residual_of(A, x)
    if resid > tol:
        raise NashSolverError(
            f"residual {resid:.3e} above tolerance {tol:.1e} "
            f"after normalization (n={n})")
    return NashSolution(MixedStrategy(x), entropy(x), resid, iterations)


def equilibrium_vertices(a, feas_tol: float = 1e-9) -> list[np.ndarray]:
    """All vertices of the equilibrium polytope (exhaustive, small n only).

    A vertex of ``{x >= 0, sum x = 1, Ax <= 0}`` activates n-1 constraints
    from the 2n candidates ``x_j = 0`` and ``(Ax)_i = 0``; every candidate
    active set yields a linear system whose solution is kept if feasible.
    """
    A = _as_antisymmetric(a)
    n = A.shape[0]
    if n == 0:
        raise ValueError("empty game: n must be >= 1")
    if n > ORACLE_MAX_N:
        raise ValueError(f"vertex enumeration limited to n <= {ORACLE_MAX_N}")
    if n == 1:
        return [np.array([1.0])]
    kinds = [("x", j) for j in range(n)] + [("d", i) for i in range(n)]
    verts: list[np.ndarray] = []
    for combo in itertools.combinations(range(2 * n), n - 1):
        M = np.zeros((n, n))
        M[0, :] = 1.0
        for r, c in enumerate(combo, start=1):
            kind, idx = kinds[c]
            if kind == "x":
                M[r, idx] = 1.0
            else:
                M[r, :] = A[idx, :]
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[-1] <= 1e-10 * max(1.0, sv[0]):
            continue
        b = np.zeros(n)
        b[0] = 1.0
        x = np.linalg.solve(M, b)
        if x.min() < -feas_tol or (A @ x).max() > feas_tol:
            continue
        x = np.clip(x, 0.0, None)
        x = x / x.sum()
        if not any(np.abs(x - v).max() < 1e-8 for v in verts):
            verts.append(x)
    return verts


def brute_force_maxent_nash(a, seed: int = 0) -> NashSolution:
    """Oracle: maxent equilibrium by vertex enumeration plus hull search.

    With a single vertex the polytope is a point.  Otherwise entropy is
    maximized over convex combinations of the vertices by seeded mirror
    ascent from several restarts; the best vertex itself is also considered.
    Limited to n <= ORACLE_MAX_N.
    """
    A = _as_antisymmetric(a)
    verts = equilibrium_vertices(A)
    if not verts:
        raise NashSolverError("vertex enumeration found no equilibrium "
                              "(antisymmetric games always have one)")
    if len(verts) == 1:
        x = verts[0]
        return NashSolution(MixedStrategy(x), entropy(x), residual_of(A, x), 1)
    V = np.stack(verts)
    K = V.shape[0]
    rng = np.random.default_rng(seed)
    best_x, best_h = None, -1.0
    starts = [np.ones(K) / K] + [rng.dirichlet(np.ones(K)) for _ in range(6)]
    iters = 0
    for z0 in starts:
        z = z0.copy()
        for t in range(1, 20_001):
            x = z @ V
            mask = x > 1e-300
            grad_x = np.zeros_like(x)
            grad_x[mask] = -(np.log(x[mask]) + 1.0)
            g = V @ grad_x
            g = g - g @ z
            step = 0.5 / max(1.0, np.abs(g).max()) / np.sqrt(t)
            z = z * np.exp(step * g)
            z = z / z.sum()
            iters += 1
        x = z @ V
        h = entropy(x)
        if h > best_h:
            best_h, best_x = h, x
    for v in verts:
        if entropy(v) > best_h:
            best_h, best_x = entropy(v), v
    best_x = np.clip(best_x, 0.0, None)
    best_x = best_x / best_x.sum()
    return NashSolution(MixedStrategy(best_x), entropy(best_x),
                        residual_of(A, best_x), iters)


def nash_support_series(a, tol: float = DEFAULT_TOL) -> list[MixedStrategy]:
    """Maxent Nash of every leading principal submatrix, zero-padded.

    Element k-1 is the equilibrium over the first k policies padded with
    zeros to full length — the per-checkpoint support trajectory of a
    growing population.
    """
    A = _as_antisymmetric(a)
    n = A.shape[0]
    out: list[MixedStrategy] = []
    for k in range(1, n + 1):
        try:
            sol = maxent_nash(A[:k, :k], tol=tol)
        except NashSolverError as exc:
            raise NashSolverError(f"subgame k={k}: {exc}") from exc
        padded = np.zeros(n)
        padded[:k] = sol.strategy.probs
        out.append(MixedStrategy(padded))
    return out
