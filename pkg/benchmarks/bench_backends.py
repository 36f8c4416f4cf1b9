#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot paths (grid classification, a full learning run) under
each backend and prints a comparison table. The numba path is warmed up
first so JIT compilation is not measured.

Usage: python benchmarks/bench_backends.py [--grid-res 100] [--repeats 3]
"""

import argparse
import time

import numpy as np

from recroa import IntegratorConfig, LearnerConfig, backend, grid_classify, learn, paper2d


def time_best(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid-res", type=int, default=100)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    field = paper2d()
    icfg = IntegratorConfig(tau_s=0.5, substeps=10)
    learn_cfg = LearnerConfig(
        epsilon=0.1, k=50, tau_s=0.5, c=3.0, family="sphere", seed=1,
        stop_after=2000, integrator=icfg,
    )

    tasks = {
        f"grid {args.grid_res}x{args.grid_res}": lambda: grid_classify(
            field, [[-4, 4], [-4, 4]], args.grid_res, 30.0, 0.05, icfg
        ),
        "sphere learn run": lambda: learn(learn_cfg, field, progress=False),
    }

    names = [n for n in ("numba", "numpy") if n in backend._BACKENDS]
    if "numba" in names:
        backend.select_backend("numba")
        for fn in tasks.values():
            fn()  # warm-up: exclude JIT compilation from the timings

    results: dict[str, dict[str, float]] = {t: {} for t in tasks}
    for name in names:
        backend.select_backend(name)
        for task, fn in tasks.items():
            results[task][name] = time_best(fn, args.repeats)

    width = max(len(t) for t in tasks) + 2
    print(f"{'task':<{width}}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for task, times in results.items():
        row = f"{task:<{width}}"
        for n in names:
            row += f"{times[n]:>11.3f}s"
        if len(names) == 2:
            row += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
