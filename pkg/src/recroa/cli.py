"""Command-line entry point.

Subcommands: learn (run a campaign from a config file), grid (reference
classification), verify (statistical recurrence certificate for a saved
set), compare (score a set against a grid), version.

Exit codes: 0 success, 1 bad config or unreadable files, 2 learn ended in
failed_all_doublings / verify found violations.
"""

from __future__ import annotations

import argparse
import datetime
import os
import sys
import time
from pathlib import Path

from . import __version__, backend, groundtruth, serialize
from .config import ConfigError, load_config
from .learner import learn

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_ERROR
    try:
        return args.handler(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="recroa", description=__doc__)
    parser.set_defaults(command=None)
    sub = parser.add_subparsers(dest="command")

    learn_p = sub.add_parser("learn", help="run a learning campaign from a config file")
    _common_flags(learn_p)
    learn_p.set_defaults(handler=cmd_learn)

    grid_p = sub.add_parser("grid", help="classify a mesh of points by simulation")
    _common_flags(grid_p)
    grid_p.set_defaults(handler=cmd_grid)

    verify_p = sub.add_parser("verify", help="probe a saved set for recurrence violations")
    verify_p.add_argument("set_file", help="set document produced by learn")
    verify_p.add_argument("--config", required=True, help="run config (system, k, tau_s, integrator)")
    verify_p.add_argument("--probes", type=int, default=10_000, help="number of uniform probes")
    verify_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    verify_p.add_argument("--workers", type=int, default=None, help="cap parallel threads")
    verify_p.set_defaults(handler=cmd_verify)

    compare_p = sub.add_parser("compare", help="score a saved set against a saved grid")
    compare_p.add_argument("set_file")
    compare_p.add_argument("grid_file")
    compare_p.set_defaults(handler=cmd_compare)

    version_p = sub.add_parser("version", help="print version and active backend")
    version_p.set_defaults(handler=cmd_version)
    return parser


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to the run config file")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=None, help="output directory (default: config out_dir)")
    p.add_argument("--workers", type=int, default=None, help="cap parallel threads (default: machine cores)")


def _apply_workers(n: int | None) -> None:
    backend.set_workers(n if n is not None else (os.cpu_count() or 1))


def _out_dir(args, cfg) -> Path:
    out = Path(args.out if args.out is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_learn(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    _apply_workers(args.workers)
    out = _out_dir(args, cfg)
    field = cfg.field()
    with open(out / "config.resolved.yaml", "w") as fh:
        serialize.dump_yaml(cfg.resolved_doc(), fh)

    log_lines: list[str] = []

    def progress(line: str) -> None:
        print(line, file=sys.stderr)
        log_lines.append(line)

    stop_when = None
    if cfg.stop_on_grid:
        grid = groundtruth.grid_classify(
            field, cfg.grid_bounds, cfg.grid_resolution, cfg.grid_horizon, cfg.grid_tol, cfg.integrator()
        )
        stop_when = groundtruth.make_grid_stop(grid)

    started = datetime.datetime.now().isoformat(timespec="seconds")
    t0 = time.perf_counter()
    result = learn(cfg.learner_config(), field, stop_when=stop_when, progress=progress)
    elapsed = time.perf_counter() - t0

    serialize.save_result(out / "result.yaml", result, epsilon=cfg.epsilon, seed=cfg.seed)
    serialize.save_set(out / "set.yaml", result.final_set, epsilon=cfg.epsilon, seed=cfg.seed)
    serialize.write_stats(out / "stats.csv", out / "stats.txt", result.stats)
    if cfg.export_set_region and not _fully_failed(result.final_set):
        serialize.write_region_csv(out / "region.csv", result.final_set, cfg.grid_bounds, cfg.grid_resolution)

    # timestamps and wall time live only here, keeping the result files replayable
    with open(out / "learn.log", "w") as fh:
        fh.write(f"started {started}\n")
        fh.write(f"backend {backend.active_backend()}\n")
        for line in log_lines:
            fh.write(line + "\n")
        fh.write(f"outcome {result.outcome}\n")
        fh.write(f"wall_time_seconds {elapsed:.3f}\n")

    stats = result.stats
    print(
        f"{result.outcome}: {stats.counter_examples} counter-examples, "
        f"{stats.samples} samples, {stats.steps_simulated} steps "
        f"({stats.avg_steps_per_sample:.2f} per sample), {stats.k_doublings} doublings"
    )
    return EXIT_OK if result.converged else EXIT_FAILED


def _fully_failed(set_) -> bool:
    members = getattr(set_, "members", (set_,))
    return all(m.is_failed for m in members)


def cmd_grid(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    _apply_workers(args.workers)
    out = _out_dir(args, cfg)
    grid = groundtruth.grid_classify(
        cfg.field(), cfg.grid_bounds, cfg.grid_resolution, cfg.grid_horizon, cfg.grid_tol, cfg.integrator()
    )
    serialize.write_grid_csv(out / "grid.csv", grid)
    n_out = int((grid.labels == groundtruth.NOT_IN_ROA).sum())
    print(f"grid: {grid.labels.size} points, {n_out} outside the basin -> {out / 'grid.csv'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    _apply_workers(args.workers)
    set_ = serialize.load_set(args.set_file)
    report = groundtruth.verify_recurrence(
        set_, cfg.field(), cfg.k, cfg.tau_s, args.probes, cfg.seed, cfg.integrator()
    )
    if report.ok:
        print(f"verify: 0 violations in {report.probes} probes")
        return EXIT_OK
    worst = ", ".join(f"{v:.6g}" for v in report.worst_point)
    print(f"verify: {report.violations} violations in {report.probes} probes (worst point: [{worst}])")
    return EXIT_FAILED


def cmd_compare(args) -> int:
    set_ = serialize.load_set(args.set_file)
    grid = serialize.read_grid_csv(args.grid_file)
    metrics = groundtruth.compare(set_, grid)
    print(f"false_inclusions={metrics.false_inclusions} coverage={metrics.coverage:.4f}")
    return EXIT_OK


def cmd_version(args) -> int:
    print(f"recroa {__version__} (backend: {backend.active_backend()})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
