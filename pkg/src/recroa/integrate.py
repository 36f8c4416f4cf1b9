"""Sampled trajectories of the flow, with early exit on set re-entry.

Integration is fixed-step classical RK4 so runs are deterministic and
replayable: each sampling period tau_s is covered by `substeps` equal RK4
steps. Set membership is evaluated only at the sampling instants n*tau_s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .dynamics import VectorField

__all__ = ["IntegratorConfig", "TrajectoryOutcome", "rk4_step", "advance_period", "sample_trajectory"]

RECURRENT = "recurrent"
COUNTER_EXAMPLE = "counter_example"
DIVERGED = "diverged"

_VERDICTS = (RECURRENT, COUNTER_EXAMPLE, DIVERGED)


@dataclass(frozen=True)
class IntegratorConfig:
    """tau_s: sampling period; substeps: RK4 steps per period; r_max:
    divergence radius mapping numerically escaping trajectories to
    counter-examples."""

    tau_s: float
    substeps: int = 10
    r_max: float = 1e3

    def __post_init__(self):
        if not (self.tau_s > 0 and np.isfinite(self.tau_s)):
            raise ValueError("tau_s must be positive and finite")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if not (self.r_max > 0):
            raise ValueError("r_max must be positive")

    @property
    def h(self) -> float:
        return self.tau_s / self.substeps


@dataclass(frozen=True)
class TrajectoryOutcome:
    """verdict: recurrent (re-entered at step n), counter_example (no
    re-entry within k steps), or diverged (left the r_max ball / went
    non-finite at step n). states_visited counts simulated sampling steps."""

    verdict: str
    step: int | None
    states_visited: int

    def __post_init__(self):
        if self.verdict not in _VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def is_counter_example(self) -> bool:
        """Divergence is treated as a counter-example by the learner."""
        return self.verdict != RECURRENT


def rk4_step(field: VectorField, state, h: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step of size h."""
    if not (h > 0):
        raise ValueError("h must be positive")
    state = np.asarray(state, dtype=np.float64)
    p = field.program
    out = backend.kernels().rk4_batch(p.code, p.iarg, p.farg, p.starts, p.stack_size, state[None, :], h, 1)
    return out[0]


def advance_period(field: VectorField, state, cfg: IntegratorConfig) -> np.ndarray:
    """Advance one sampling period tau_s (substeps RK4 steps)."""
    state = np.asarray(state, dtype=np.float64)
    p = field.program
    out = backend.kernels().rk4_batch(
        p.code, p.iarg, p.farg, p.starts, p.stack_size, state[None, :], cfg.h, cfg.substeps
    )
    return out[0]


def sample_trajectory(field: VectorField, x0, k: int, cfg: IntegratorConfig, membership) -> TrajectoryOutcome:
    """Simulate x_1, x_2, ... up to x_k and classify against `membership`.

    Returns recurrent(n) at the first n with membership(x_n) true,
    diverged(n) if the state leaves the r_max ball or goes non-finite,
    and counter_example after k steps without re-entry.

    `membership` is either a predicate on state vectors, or an approximation
    set from recroa.sets (for which the fast kernel path is used).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (field.dimension,):
        raise ValueError(f"x0 must have shape ({field.dimension},)")

    packed = _try_pack_set(membership)
    if packed is not None:
        verdict, n = _simulate_packed(field, x0[None, :], k, cfg, packed, batch=False)
        return _outcome(int(verdict), int(n), k)

    # generic predicate: step in the kernel, test membership in Python
    x = x0
    for n in range(1, k + 1):
        x = advance_period(field, x, cfg)
        if not np.all(np.isfinite(x)) or float(np.sqrt(np.sum(x * x))) > cfg.r_max:
            return TrajectoryOutcome(DIVERGED, n, n)
        if membership(x):
            return TrajectoryOutcome(RECURRENT, n, n)
    return TrajectoryOutcome(COUNTER_EXAMPLE, None, k)


def classify_batch(field: VectorField, points: np.ndarray, k: int, cfg: IntegratorConfig, set_) -> tuple[np.ndarray, np.ndarray]:
    """Classify many start points against an approximation set at once.

    Returns (verdicts, steps) as arrays of kernel verdict codes and
    sampling-step counts; used by recurrence verification.
    """
    packed = _try_pack_set(set_)
    if packed is None:
        raise TypeError("classify_batch requires an approximation set")
    points = np.ascontiguousarray(points, dtype=np.float64)
    return _simulate_packed(field, points, k, cfg, packed, batch=True)


def _outcome(verdict_code: int, n: int, k: int) -> TrajectoryOutcome:
    kn = backend.kernels()
    if verdict_code == kn.VERDICT_RECURRENT:
        return TrajectoryOutcome(RECURRENT, n, n)
    if verdict_code == kn.VERDICT_DIVERGED:
        return TrajectoryOutcome(DIVERGED, n, n)
    return TrajectoryOutcome(COUNTER_EXAMPLE, None, k)


def _try_pack_set(obj):
    pack = getattr(obj, "_membership_arrays", None)
    if pack is None:
        return None
    return pack()


def _simulate_packed(field, points, k, cfg, packed, batch):
    p = field.program
    kn = backend.kernels()
    family = packed[0]
    if family == "sphere":
        _, centers, radii = packed
        fn = kn.simulate_spheres_batch if batch else kn.simulate_spheres
        args = (points if batch else points[0], k, cfg.substeps, cfg.h, cfg.r_max, centers, radii)
    else:
        _, centers, A, B = packed
        fn = kn.simulate_polys_batch if batch else kn.simulate_polys
        args = (points if batch else points[0], k, cfg.substeps, cfg.h, cfg.r_max, centers, A, B)
    return fn(p.code, p.iarg, p.farg, p.starts, p.stack_size, *args)
