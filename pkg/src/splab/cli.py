"""Command-line interface.

Subcommands: ``train`` (run a self-play scheme and checkpoint it),
``matrix`` (estimate a winrate matrix over checkpoints or fixed agents),
``analyze`` (evaluation matrix, Nash support, heatmaps from a winrate CSV),
``rpp`` (relative population performance between two runs), and ``sweep``
(PSRO hyperparameter grid with time profiling).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .metagame import CONSISTENCY_TOL  # noqa: F401  (re-export convenience)
from .nash import NashSolverError
from .rirrps import FixedAgent


def _add_seed_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="override run seed")
    p.add_argument("--out", type=Path, default=None, help="override output dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splab",
        description="Self-play schemes with game-theoretic population evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run one self-play training experiment")
    p.add_argument("--config", type=Path, required=True,
                   help="flat key=value experiment config file")
    _add_seed_out(p)

    p = sub.add_parser("matrix", help="estimate a winrate matrix")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--run", type=Path, help="run directory with snapshots/")
    src.add_argument("--agents", type=str,
                     help="comma list of fixed agents (rock,paper,scissors,random)")
    p.add_argument("--sims", type=int, default=30, help="simulations per entry")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--recall", type=int, default=3)
    _add_seed_out(p)

    p = sub.add_parser("analyze", help="evaluation matrix, Nash support, heatmaps")
    p.add_argument("--matrix", type=Path, required=True, help="winrate CSV path")
    p.add_argument("--series", action="store_true",
                   help="also emit the per-subgame Nash support series")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("rpp", help="relative population performance of two runs")
    p.add_argument("--run-a", type=Path, required=True)
    p.add_argument("--run-b", type=Path, required=True)
    p.add_argument("--sims", type=int, default=30)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--recall", type=int, default=3)
    _add_seed_out(p)

    p = sub.add_parser("sweep", help="PSRO (w, n_matches) grid with profiling")
    p.add_argument("--grid", type=str, required=True,
                   help="cells as w:n_matches pairs, e.g. 0.72:50,0.99:50")
    p.add_argument("--episodes", type=int, default=2000)
    p.add_argument("--config", type=Path, default=None,
                   help="optional base config for env/learner settings")
    _add_seed_out(p)
    return parser


def _parse_grid(text: str) -> list[tuple[float, int]]:
    cells = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        w_str, n_str = chunk.split(":")
        cells.append((float(w_str), int(n_str)))
    if not cells:
        raise ValueError("empty sweep grid")
    return cells


def _cmd_train(args) -> int:
    cfg = harness.parse_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    result = harness.train(cfg)
    print(f"trained {cfg.scheme}: {len(result.snapshot_paths)} checkpoints, "
          f"menagerie size {result.menagerie_size} -> {result.out_dir}")
    return 0


def _cmd_matrix(args) -> int:
    env = harness.RirRpsConfig(repetitions=args.repetitions, recall=args.recall)
    seed = args.seed if args.seed is not None else 0
    if args.run is not None:
        policies, labels = harness.load_population(args.run)
        out_dir = args.out if args.out is not None else args.run
    else:
        kinds = [k.strip() for k in args.agents.split(",") if k.strip()]
        policies = [FixedAgent(k) for k in kinds]
        labels = kinds
        if args.out is None:
            raise ValueError("--out is required with --agents")
        out_dir = args.out
    matrix = harness.estimate_winrate_matrix(
        policies, env, args.sims, seed, labels=labels, n_jobs=args.jobs)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    harness.write_winrate_csv(out_dir / "winrate.csv", matrix)
    print(f"estimated {matrix.n}x{matrix.n} winrate matrix -> "
          f"{out_dir / 'winrate.csv'}")
    return 0


def _cmd_analyze(args) -> int:
    report = harness.analyze(args.matrix, out_dir=args.out, series=args.series,
                             tol=args.tol)
    for artifact, name in report["artifacts"].items():
        print(f"wrote {name}")
    for artifact, error in report["errors"].items():
        print(f"solver failure on {artifact}: {error}", file=sys.stderr)
    return 0


def _cmd_rpp(args) -> int:
    env = harness.RirRpsConfig(repetitions=args.repetitions, recall=args.recall)
    seed = args.seed if args.seed is not None else 0
    out = args.out if args.out is not None else Path(args.run_a) / "rpp"
    values = harness.rpp_report(args.run_a, args.run_b, env, args.sims, seed,
                                out, n_jobs=args.jobs)
    print(f"rpp evolution over {values.size} sizes, final value "
          f"{values[-1]:.6f} -> {out}")
    return 0


def _cmd_sweep(args) -> int:
    base = harness.parse_config(args.config) if args.config else None
    seed = args.seed if args.seed is not None else 0
    out = args.out if args.out is not None else Path("sweep")
    rows = harness.psro_sweep(_parse_grid(args.grid), args.episodes, seed, out,
                              base=base)
    for row in rows:
        print(f"w={row['w']:g} n={row['n_matches']}: M={row['m_percent']:.2f}% "
              f"W={row['w_percent']:.2f}% size={row['menagerie_size']} "
              f"({row['status']})")
    failed = [r for r in rows if r["status"] != "ok"]
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"train": _cmd_train, "matrix": _cmd_matrix,
                "analyze": _cmd_analyze, "rpp": _cmd_rpp, "sweep": _cmd_sweep}
    try:
        return handlers[args.command](args)
    except harness.TrainAborted as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 3
    except NashSolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
