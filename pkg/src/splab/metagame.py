"""Meta-game matrix types: winrates, evaluation matrices, mixed strategies.

A population of policies induces an empirical winrate matrix W whose entry
``w[i][j]`` is the fraction of matches policy i wins against policy j.  The
evaluation matrix ``A = W - 1/2`` is antisymmetric and is treated as the
payoff matrix of a symmetric zero-sum game over the population.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

#: tolerance for consistency checks on matrix construction
CONSISTENCY_TOL = 1e-9

#: probabilities below this are serialized as exactly zero (support cut-off)
SUPPORT_EPS = 1e-9


def _as_float_matrix(entries) -> np.ndarray:
    a = np.array(entries, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class MixedStrategy:
    """A probability vector over n pure strategies (policies)."""

    probs: np.ndarray

    def __init__(self, probs) -> None:
        p = np.array(probs, dtype=float).reshape(-1)
        if p.size == 0:
            raise ValueError("empty strategy vector")
        if np.any(p < 0):
            raise ValueError(f"negative probability: min={p.min()}")
        if abs(p.sum() - 1.0) > CONSISTENCY_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, i: int) -> float:
        return float(self.probs[i])

    def support(self, eps: float = SUPPORT_EPS) -> np.ndarray:
        """Probabilities with entries below ``eps`` snapped to exact zero."""
        out = self.probs.copy()
        out[out < eps] = 0.0
        return out


@dataclass(frozen=True)
class WinrateMatrix:
    """Square winrate matrix over one population.

    Construction enforces the symmetry constraint exactly: the upper triangle
    is authoritative, ``w[j][i]`` is rewritten as ``1 - w[i][j]`` and the
    diagonal as 0.5, after verifying the input satisfied both within
    ``CONSISTENCY_TOL``.
    """

    entries: np.ndarray
    labels: tuple[str, ...]
    sims_per_entry: int

    def __init__(self, entries, labels: Sequence[str] | None = None,
                 sims_per_entry: int = 1) -> None:
        w = _as_float_matrix(entries)
        n = w.shape[0]
        if w.shape[1] != n:
            raise ValueError(f"winrate matrix must be square, got {w.shape}")
        if sims_per_entry < 1:
            raise ValueError("sims_per_entry must be positive")
        if w.min() < -CONSISTENCY_TOL or w.max() > 1 + CONSISTENCY_TOL:
            raise ValueError("winrates must lie in [0, 1]")
        if np.abs(np.diag(w) - 0.5).max() > CONSISTENCY_TOL:
            raise ValueError("diagonal winrates must equal 0.5")
        if np.abs(w + w.T - 1.0).max() > CONSISTENCY_TOL:
            raise ValueError("winrate symmetry violated: w[i][j] + w[j][i] != 1")
        canon = np.triu(w, k=1)
        canon = canon + np.tril(1.0 - canon.T, k=-1)
        np.fill_diagonal(canon, 0.5)
        canon = np.clip(canon, 0.0, 1.0)
        canon.flags.writeable = False
        if labels is None:
            labels = [str(i + 1) for i in range(n)]
        if len(labels) != n:
            raise ValueError("label count does not match matrix size")
        object.__setattr__(self, "entries", canon)
        object.__setattr__(self, "labels", tuple(str(l) for l in labels))
        object.__setattr__(self, "sims_per_entry", int(sims_per_entry))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class CrossWinrateMatrix:
    """Rectangular winrate matrix between two populations.

    Rows index the first population, columns the second; entries are the row
    policy's winrate and only the [0, 1] range is enforced (no antisymmetry
    across distinct populations).
    """

    entries: np.ndarray
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    sims_per_entry: int

    def __init__(self, entries, row_labels: Sequence[str] | None = None,
                 col_labels: Sequence[str] | None = None,
                 sims_per_entry: int = 1) -> None:
        w = _as_float_matrix(entries)
        if sims_per_entry < 1:
            raise ValueError("sims_per_entry must be positive")
        if w.min() < -CONSISTENCY_TOL or w.max() > 1 + CONSISTENCY_TOL:
            raise ValueError("winrates must lie in [0, 1]")
        w = np.clip(w, 0.0, 1.0)
        w.flags.writeable = False
        m, k = w.shape
        if row_labels is None:
            row_labels = [str(i + 1) for i in range(m)]
        if col_labels is None:
            col_labels = [str(j + 1) for j in range(k)]
        if len(row_labels) != m or len(col_labels) != k:
            raise ValueError("label count does not match matrix shape")
        object.__setattr__(self, "entries", w)
        object.__setattr__(self, "row_labels", tuple(str(l) for l in row_labels))
        object.__setattr__(self, "col_labels", tuple(str(l) for l in col_labels))
        object.__setattr__(self, "sims_per_entry", int(sims_per_entry))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True)
class EvaluationMatrix:
    """Antisymmetric payoff matrix A with entries in [-1/2, 1/2]."""

    entries: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def __init__(self, entries, labels: Sequence[str] | None = None) -> None:
        a = _as_float_matrix(entries)
        n = a.shape[0]
        if a.shape[1] != n:
            raise ValueError(f"evaluation matrix must be square, got {a.shape}")
        if np.abs(a + a.T).max() > CONSISTENCY_TOL:
            raise ValueError("evaluation matrix must be antisymmetric")
        if np.abs(a).max() > 0.5 + CONSISTENCY_TOL:
            raise ValueError("evaluation entries must lie in [-1/2, 1/2]")
        canon = (a - a.T) / 2.0
        np.fill_diagonal(canon, 0.0)
        canon.flags.writeable = False
        if labels is None:
            labels = [str(i + 1) for i in range(n)]
        if len(labels) != n:
            raise ValueError("label count does not match matrix size")
        object.__setattr__(self, "entries", canon)
        object.__setattr__(self, "labels", tuple(str(l) for l in labels))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def winrate_to_evaluation(w: WinrateMatrix) -> EvaluationMatrix:
    """A = W - 1/2 elementwise; antisymmetry follows from W's symmetry."""
    return EvaluationMatrix(w.entries - 0.5, labels=w.labels)


def evaluation_to_winrate(a: EvaluationMatrix, sims_per_entry: int = 1) -> WinrateMatrix:
    """Inverse of :func:`winrate_to_evaluation` (adds 1/2 back)."""
    return WinrateMatrix(a.entries + 0.5, labels=a.labels,
                         sims_per_entry=sims_per_entry)


def cross_winrate_to_evaluation(w: CrossWinrateMatrix) -> np.ndarray:
    """Rectangular evaluation matrix W - 1/2 for a two-population pairing."""
    return w.entries - 0.5


def submatrix(a: EvaluationMatrix, k: int) -> EvaluationMatrix:
    """Leading principal k-by-k block (the meta-game among the first k)."""
    if not 1 <= k <= a.n:
        raise ValueError(f"submatrix size {k} out of range 1..{a.n}")
    return EvaluationMatrix(a.entries[:k, :k], labels=a.labels[:k])


# ---------------------------------------------------------------------------
# CSV serialization: first row = column labels, first column = row labels,
# 6-decimal fixed-point cells, LF line endings.
# ---------------------------------------------------------------------------

def format_cell(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def matrix_to_csv(entries: np.ndarray, row_labels: Sequence[str],
                  col_labels: Sequence[str]) -> str:
    for lab in (*row_labels, *col_labels):
        if "," in lab or "\n" in lab:
            raise ValueError(f"label not CSV-safe: {lab!r}")
    buf = io.StringIO()
    buf.write("," + ",".join(col_labels) + "\n")
    for lab, row in zip(row_labels, np.atleast_2d(entries)):
        buf.write(lab + "," + ",".join(format_cell(v) for v in row) + "\n")
    return buf.getvalue()


def csv_to_matrix(text: str) -> tuple[np.ndarray, list[str], list[str]]:
    lines = [ln for ln in text.split("\n") if ln != ""]
    header = lines[0].split(",")
    col_labels = header[1:]
    row_labels = []
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        row_labels.append(cells[0])
        rows.append([float(c) for c in cells[1:]])
    entries = np.array(rows, dtype=float)
    if entries.shape != (len(row_labels), len(col_labels)):
        raise ValueError("ragged CSV matrix")
    return entries, row_labels, col_labels


def read_matrix_csv(path: Path | str) -> tuple[np.ndarray, list[str], list[str]]:
    return csv_to_matrix(Path(path).read_text(encoding="utf-8"))
