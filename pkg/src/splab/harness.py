"""Experiment orchestration: training runs, winrate-matrix estimation,
analysis reports, population comparison, and the PSRO hyperparameter sweep.

Everything is keyed off a single run seed: each episode, match simulation,
and meta-game match derives its own RNG stream from (seed, purpose tag,
indices), so results are bit-identical regardless of execution order or
worker count.  Wall-clock timings never enter deterministic artifacts; PSRO
timers live in a separate ``timing.json``.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .ioutil import atomic_write_text, content_hash
from .learner import LearnerConfig, ReinforceLearner, TabularSoftmaxPolicy
from .metagame import (CrossWinrateMatrix, WinrateMatrix,
                       cross_winrate_to_evaluation, matrix_to_csv,
                       read_matrix_csv, winrate_to_evaluation)
from .nash import NashSolverError, maxent_nash, nash_support_series
from .population import rpp_evolution
from .reports import (rpp_figure_png, serialized_probs, winrate_figure_png,
                      write_heatmap_svg, write_json_report, write_vector_csv)
from .rirrps import (FixedAgent, RirRpsConfig, decide_winner, play_episode,
                     state_count)
from .seeding import TAG_CROSS, TAG_EPISODE, TAG_MATCH, TAG_META, rng_for
from .selfplay import (Menagerie, PsroScheme, SelfPlayScheme, scheme_from_name)

SCHEME_NAMES = ("naive", "delta_uniform", "delta_limit_uniform", "psro")


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: str = "naive"
    delta: float = 0.0
    psro_w: float = 0.72
    psro_n_matches: int = 50
    episodes: int = 12800
    checkpoints: int = 100
    sims_per_entry: int = 30
    seed: int = 0
    env: RirRpsConfig = field(default_factory=RirRpsConfig)
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    out_dir: Path = Path("run")

    def __post_init__(self) -> None:
        if self.scheme not in SCHEME_NAMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; "
                             f"choose from {SCHEME_NAMES}")
        for name in ("episodes", "checkpoints", "sims_per_entry"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.checkpoints > self.episodes:
            raise ValueError("checkpoints cannot exceed episodes")
        object.__setattr__(self, "out_dir", Path(self.out_dir))

    def to_text(self) -> str:
        """Canonical flat key=value form (also the config-hash preimage)."""
        items = [
            ("scheme", self.scheme),
            ("delta", repr(self.delta)),
            ("psro_w", repr(self.psro_w)),
            ("psro_n_matches", self.psro_n_matches),
            ("episodes", self.episodes),
            ("checkpoints", self.checkpoints),
            ("sims_per_entry", self.sims_per_entry),
            ("seed", self.seed),
            ("repetitions", self.env.repetitions),
            ("recall", self.env.recall),
            ("learning_rate", repr(self.learner.learning_rate)),
            ("discount", repr(self.learner.discount)),
            ("baseline_decay", repr(self.learner.baseline_decay)),
        ]
        return "".join(f"{k} = {v}\n" for k, v in items)


_INT_KEYS = {"psro_n_matches", "episodes", "checkpoints", "sims_per_entry",
             "seed", "repetitions", "recall"}
_FLOAT_KEYS = {"delta", "psro_w", "learning_rate", "discount", "baseline_decay"}


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Flat ``key = value`` lines; '#' starts a comment; unknown keys error."""
    cfg = base or ExperimentConfig()
    env = dict(repetitions=cfg.env.repetitions, recall=cfg.env.recall)
    lrn = dict(learning_rate=cfg.learner.learning_rate,
               discount=cfg.learner.discount,
               baseline_decay=cfg.learner.baseline_decay)
    top: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _INT_KEYS:
            parsed: object = int(value)
        elif key in _FLOAT_KEYS:
            parsed = float(value)
        elif key in ("scheme", "out"):
            parsed = value
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key in ("repetitions", "recall"):
            env[key] = parsed
        elif key in lrn:
            lrn[key] = parsed
        elif key == "out":
            top["out_dir"] = Path(str(parsed))
        else:
            top[key] = parsed
    return replace(cfg, env=RirRpsConfig(**env), learner=LearnerConfig(**lrn), **top)


def parse_config(path: Path | str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), base=base)


def checkpoint_episodes(episodes: int, checkpoints: int) -> list[int]:
    """Evenly spaced freeze points: floor(i * episodes / checkpoints)."""
    return [i * episodes // checkpoints for i in range(1, checkpoints + 1)]


def _build_scheme(cfg: ExperimentConfig) -> SelfPlayScheme:
    runner = None
    if cfg.scheme == "psro":
        runner = make_match_runner(cfg.env, cfg.sims_per_entry, cfg.seed)
    return scheme_from_name(cfg.scheme, delta=cfg.delta, w=cfg.psro_w,
                            n_matches=cfg.psro_n_matches,
                            sims_per_entry=cfg.sims_per_entry,
                            match_runner=runner)


def make_match_runner(env: RirRpsConfig, sims: int, seed: int):
    """Winrate estimator for PSRO meta-game extension (TAG_META streams)."""

    def run(policy_a, policy_b, i: int, j: int) -> float:
        wins = 0
        for s in range(sims):
            rng = rng_for(seed, TAG_META, i, j, s)
            result = play_episode(policy_a, policy_b, env, rng)
            if decide_winner(result, rng) == 0:
                wins += 1
        return wins / sims

    return run


class TrainAborted(RuntimeError):
    """Training stopped early (e.g. meta-solver failure); manifest flagged."""


@dataclass
class TrainResult:
    out_dir: Path
    snapshot_paths: list[Path]
    checkpoint_episodes: list[int]
    insertions: list[int]
    menagerie_size: int
    scheme: SelfPlayScheme


def train(cfg: ExperimentConfig) -> TrainResult:
    """Run the self-play loop and write snapshots, logs, and the manifest.

    Loop order per episode: sample opponent -> play -> learn -> curate.
    Only seat 1 (the live policy) learns; the opponent snapshot is frozen.
    """
    out = Path(cfg.out_dir)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    live = TabularSoftmaxPolicy(n_states=state_count(cfg.env.recall))
    learner = ReinforceLearner(live, cfg.learner)
    menagerie = Menagerie(live)
    scheme = _build_scheme(cfg)

    freeze_at = checkpoint_episodes(cfg.episodes, cfg.checkpoints)
    freeze_set = set(freeze_at)
    snapshot_paths: list[Path] = []
    sizes_at_checkpoints: list[int] = []
    insertions: list[int] = []
    sampling_lines: list[str] = []
    outcome_lines: list[str] = []
    trajectory_lines: list[str] = []
    aborted_reason: str | None = None
    episodes_done = 0
    ordinal = 0

    try:
        for episode in range(1, cfg.episodes + 1):
            rng = rng_for(cfg.seed, TAG_EPISODE, episode)
            entry = scheme.sample(menagerie, rng)
            result = play_episode(live, entry.policy, cfg.env, rng)
            won = decide_winner(result, rng) == 0
            trajectory = [(s1, a1, r) for (s1, _), (a1, _), r in
                          zip(result.states, result.joint_actions, result.rewards1)]
            learner.update(trajectory)
            before = len(menagerie)
            scheme.curate(menagerie, live, episode, won=won)
            if cfg.scheme == "psro" and len(menagerie) > before:
                insertions.append(episode)
            sampling_lines.append(f"{episode} {entry.stamp}")
            outcome_lines.append(f"{episode} {int(won)}")
            trajectory_lines.append(
                f"{episode} " + " ".join(str(j) for j in result.joint_indices))
            episodes_done = episode
            if episode in freeze_set:
                ordinal += 1
                path = out / "snapshots" / f"{ordinal:03d}.policy"
                live.save(path)
                snapshot_paths.append(path)
                sizes_at_checkpoints.append(len(menagerie))
    except NashSolverError as exc:
        aborted_reason = str(exc)

    atomic_write_text(out / "sampling.log", "\n".join(sampling_lines) + "\n")
    atomic_write_text(out / "outcomes.log", "\n".join(outcome_lines) + "\n")
    atomic_write_text(out / "trajectories.log", "\n".join(trajectory_lines) + "\n")

    manifest = {
        "config": {k.strip(): v.strip() for k, v in
                   (line.split(" = ") for line in cfg.to_text().splitlines())},
        "config_hash": content_hash(cfg.to_text()),
        "checkpoint_episodes": freeze_at,
        "snapshots": [p.name for p in snapshot_paths],
        "menagerie_size_at_checkpoints": sizes_at_checkpoints,
        "menagerie_size_final": len(menagerie),
        "menagerie_history_count": menagerie.history_count,
        "insertions": insertions,
        "episodes_completed": episodes_done,
        "aborted": aborted_reason,
    }
    write_json_report(out / "manifest.json", manifest)

    if isinstance(scheme, PsroScheme):
        write_json_report(out / "timing.json", {
            "solver_seconds": scheme.state.solver_seconds,
            "matrix_seconds": scheme.state.matrix_seconds,
        })

    if aborted_reason is not None:
        raise TrainAborted(f"run aborted after episode {episodes_done}: "
                           f"{aborted_reason}")
    return TrainResult(out, snapshot_paths, freeze_at, insertions,
                       len(menagerie), scheme)


# ---------------------------------------------------------------------------
# Winrate-matrix estimation
# ---------------------------------------------------------------------------

def _pair_winrate(task) -> tuple[int, int, float]:
    policy_a, policy_b, env, sims, seed, tag, i, j = task
    wins = 0
    for s in range(sims):
        rng = rng_for(seed, tag, i, j, s)
        result = play_episode(policy_a, policy_b, env, rng)
        if decide_winner(result, rng) == 0:
            wins += 1
    return i, j, wins / sims


def _run_tasks(tasks, n_jobs: int):
    if n_jobs <= 1:
        return [_pair_winrate(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(_pair_winrate, tasks))


def estimate_winrate_matrix(policies: Sequence, env: RirRpsConfig,
                            sims_per_entry: int, seed: int,
                            labels: Sequence[str] | None = None,
                            n_jobs: int = 1) -> WinrateMatrix:
    """Square matrix over one population: each unordered pair simulated once,
    the mirror entry filled as 1 - w, diagonal pinned at 0.5."""
    n = len(policies)
    if n < 1:
        raise ValueError("population must contain at least one policy")
    if sims_per_entry < 1:
        raise ValueError("sims_per_entry must be >= 1")
    tasks = [(policies[i], policies[j], env, sims_per_entry, seed, TAG_MATCH, i, j)
             for i in range(n) for j in range(i + 1, n)]
    w = np.full((n, n), 0.5)
    for i, j, wij in _run_tasks(tasks, n_jobs):
        w[i, j] = wij
        w[j, i] = 1.0 - wij
    return WinrateMatrix(w, labels=labels, sims_per_entry=sims_per_entry)


def estimate_cross_winrate_matrix(rows: Sequence, cols: Sequence,
                                  env: RirRpsConfig, sims_per_entry: int,
                                  seed: int,
                                  row_labels: Sequence[str] | None = None,
                                  col_labels: Sequence[str] | None = None,
                                  n_jobs: int = 1) -> CrossWinrateMatrix:
    """Rectangular matrix between two populations; every ordered pair is
    simulated (no symmetry assumption across populations)."""
    tasks = [(rows[i], cols[j], env, sims_per_entry, seed, TAG_CROSS, i, j)
             for i in range(len(rows)) for j in range(len(cols))]
    w = np.zeros((len(rows), len(cols)))
    for i, j, wij in _run_tasks(tasks, n_jobs):
        w[i, j] = wij
    return CrossWinrateMatrix(w, row_labels=row_labels, col_labels=col_labels,
                              sims_per_entry=sims_per_entry)


def load_population(run_dir: Path | str) -> tuple[list[TabularSoftmaxPolicy], list[str]]:
    """Checkpoint policies of a finished run, in checkpoint order."""
    run_dir = Path(run_dir)
    paths = sorted((run_dir / "snapshots").glob("*.policy"))
    if not paths:
        raise FileNotFoundError(f"no snapshots under {run_dir}")
    return [TabularSoftmaxPolicy.load(p) for p in paths], [p.stem for p in paths]


def write_winrate_csv(path: Path | str, matrix: WinrateMatrix) -> None:
    atomic_write_text(path, matrix_to_csv(matrix.entries, matrix.labels,
                                          matrix.labels))


# ---------------------------------------------------------------------------
# Analysis
# ---------------------------------------------------------------------------

def analyze(winrate_csv: Path | str, out_dir: Path | str | None = None,
            series: bool = False, tol: float = 1e-6) -> dict:
    """Evaluation matrix, maxent-Nash support, heatmaps, JSON report.

    Individual solver failures are recorded in the report and remaining
    artifacts are still produced.
    """
    winrate_csv = Path(winrate_csv)
    out = Path(out_dir) if out_dir is not None else winrate_csv.parent
    out.mkdir(parents=True, exist_ok=True)
    entries, row_labels, col_labels = read_matrix_csv(winrate_csv)
    matrix = WinrateMatrix(entries, labels=row_labels)
    evaluation = winrate_to_evaluation(matrix)
    atomic_write_text(out / "evaluation.csv",
                      matrix_to_csv(evaluation.entries, row_labels, row_labels))
    write_heatmap_svg(out / "heatmap.svg", matrix.entries, row_labels, col_labels)

    report: dict = {"n": matrix.n, "winrate_csv": winrate_csv.name,
                    "artifacts": {}, "errors": {}}
    support = None
    try:
        solution = maxent_nash(evaluation, tol=tol)
        support = np.array(serialized_probs(solution.strategy.support()))
        write_vector_csv(out / "nash_support.csv", ("checkpoint", "support"),
                         list(zip(row_labels, support)))
        report["nash"] = {
            "strategy": serialized_probs(solution.strategy.support()),
            "entropy": solution.entropy,
            "residual": solution.residual,
            "iterations": solution.iterations,
        }
        report["artifacts"]["nash_support"] = "nash_support.csv"
    except NashSolverError as exc:
        report["errors"]["nash_support"] = str(exc)

    if series:
        try:
            strategies = nash_support_series(evaluation, tol=tol)
            rows = np.stack([np.array(serialized_probs(s.support()))
                             for s in strategies])
            atomic_write_text(
                out / "nash_support_series.csv",
                matrix_to_csv(rows, [f"k={k}" for k in range(1, matrix.n + 1)],
                              row_labels))
            report["artifacts"]["nash_support_series"] = "nash_support_series.csv"
        except NashSolverError as exc:
            report["errors"]["nash_support_series"] = str(exc)

    winrate_figure_png(out / "heatmap.png", matrix.entries, row_labels,
                       support=support)
    report["artifacts"]["evaluation"] = "evaluation.csv"
    report["artifacts"]["heatmap_svg"] = "heatmap.svg"
    report["artifacts"]["heatmap_png"] = "heatmap.png"
    write_json_report(out / "report.json", report)
    return report


def rpp_report(run_a: Path | str, run_b: Path | str, env: RirRpsConfig,
               sims_per_entry: int, seed: int, out_dir: Path | str,
               n_jobs: int = 1) -> np.ndarray:
    """Relative-population-performance evolution between two runs.

    The cross matrix is estimated once and sliced for every leading block.
    Comparing a run with itself takes the square symmetric path, making the
    evaluation matrix exactly antisymmetric (value 0 at every size).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pop_a, labels_a = load_population(run_a)
    pop_b, labels_b = load_population(run_b)
    if len(pop_a) != len(pop_b):
        raise ValueError(
            f"populations must have equal checkpoint counts, got "
            f"{len(pop_a)} vs {len(pop_b)}")
    same = Path(run_a).resolve() == Path(run_b).resolve()
    if same:
        square = estimate_winrate_matrix(pop_a, env, sims_per_entry, seed,
                                         labels=labels_a, n_jobs=n_jobs)
        cross_entries = square.entries
        evaluation = cross_entries - 0.5
        row_labels, col_labels = labels_a, labels_a
    else:
        cross = estimate_cross_winrate_matrix(
            pop_a, pop_b, env, sims_per_entry, seed,
            row_labels=labels_a, col_labels=labels_b, n_jobs=n_jobs)
        cross_entries = cross.entries
        evaluation = cross_winrate_to_evaluation(cross)
        row_labels, col_labels = labels_a, labels_b
    atomic_write_text(out / "cross_winrate.csv",
                      matrix_to_csv(cross_entries, row_labels, col_labels))
    values = rpp_evolution(evaluation)
    write_vector_csv(out / "rpp_evolution.csv", ("size", "value"),
                     [(str(i + 1), v) for i, v in enumerate(values)])
    rpp_figure_png(out / "rpp_evolution.png", values)
    return values


# ---------------------------------------------------------------------------
# PSRO hyperparameter sweep
# ---------------------------------------------------------------------------

def psro_sweep(grid: Sequence[tuple[float, int]], episodes: int, seed: int,
               out_dir: Path | str,
               base: ExperimentConfig | None = None) -> list[dict]:
    """One PSRO run per (w, n_matches) cell, profiled.

    Reports the share of wall time in the meta-solver (M) and in winrate
    matrix updates (W), the total time, and the final menagerie size.
    Degenerate cells (gate never fires, size stays 1) are results, not
    errors; genuine failures are recorded per cell and the sweep continues.
    """
    if not grid:
        raise ValueError("sweep grid is empty")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = base or ExperimentConfig()
    rows: list[dict] = []
    for w, n_matches in grid:
        cell_dir = out / f"cell_w{w:g}_n{n_matches}"
        cfg = replace(base, scheme="psro", psro_w=w, psro_n_matches=n_matches,
                      episodes=episodes, seed=seed,
                      checkpoints=min(base.checkpoints, episodes),
                      out_dir=cell_dir)
        row = {"w": w, "n_matches": n_matches, "m_percent": 0.0,
               "w_percent": 0.0, "total_seconds": 0.0, "menagerie_size": 1,
               "status": "ok"}
        t0 = time.perf_counter()
        try:
            result = train(cfg)
            total = time.perf_counter() - t0
            state = result.scheme.state
            row.update(
                m_percent=100.0 * state.solver_seconds / total,
                w_percent=100.0 * state.matrix_seconds / total,
                total_seconds=total,
                menagerie_size=result.menagerie_size)
        except (TrainAborted, OSError, ValueError) as exc:
            row.update(total_seconds=time.perf_counter() - t0,
                       status=f"error: {exc}")
        rows.append(row)
    lines = ["w,n_matches,m_percent,w_percent,total_seconds,menagerie_size,status"]
    for row in rows:
        lines.append(",".join([
            f"{row['w']:.6f}", str(row["n_matches"]),
            f"{row['m_percent']:.6f}", f"{row['w_percent']:.6f}",
            f"{row['total_seconds']:.6f}", str(row["menagerie_size"]),
            row["status"].replace(",", ";"),
        ]))
    atomic_write_text(out / "sweep_report.csv", "\n".join(lines) + "\n")
    return rows
