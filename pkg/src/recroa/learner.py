"""Sequential counter-example-driven shrinking of a candidate set.

The loop: draw a point uniformly from the current approximation, simulate
its sampled trajectory, and on a counter-example (no re-entry within k
steps, or divergence) shrink every member containing the point. When the
anchor member fails (offset below zero) the trajectory length k is doubled
and the sets are reset. The run converges once `stop_after` consecutive
samples are recurrent.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import sets
from .dynamics import VectorField
from .integrate import RECURRENT, IntegratorConfig, TrajectoryOutcome, sample_trajectory
from .sets import MultiApprox, PolytopeSet, SphereSet, generate_directions

__all__ = ["LearnerConfig", "RunStats", "RunEvent", "RunResult", "classify_sample", "learn"]

CONVERGED = "converged"
FAILED_ALL_DOUBLINGS = "failed_all_doublings"

VOLUME_REFRESH_SAMPLES = 4096  # Monte Carlo size for polytope member weights


@dataclass(frozen=True)
class LearnerConfig:
    epsilon: float
    k: int
    tau_s: float
    c: float
    family: str = sets.SPHERE
    n_directions: int = 200  # polytope family only
    centers: np.ndarray | None = None  # (h, d); row 0 must be the equilibrium
    seed: int = 0
    stop_after: int = 2000  # consecutive recurrent samples that end the run
    k_doublings_max: int = 6
    integrator: IntegratorConfig | None = None

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError("epsilon must be positive")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not (self.tau_s > 0):
            raise ValueError("tau_s must be positive")
        if not (self.c > 0):
            raise ValueError("c must be positive")
        if self.family not in (sets.SPHERE, sets.POLYTOPE):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == sets.POLYTOPE and self.n_directions < 1:
            raise ValueError("n_directions must be >= 1")
        if self.stop_after < 1:
            raise ValueError("stop_after must be >= 1")
        if self.k_doublings_max < 0:
            raise ValueError("k_doublings_max must be >= 0")
        if self.centers is not None:
            centers = np.ascontiguousarray(self.centers, dtype=np.float64)
            if centers.ndim != 2:
                raise ValueError("centers must be an (h, d) array")
            if np.any(centers[0] != 0.0):
                raise ValueError("the first center must be the equilibrium (origin)")
            object.__setattr__(self, "centers", centers)
        if self.integrator is None:
            object.__setattr__(self, "integrator", IntegratorConfig(tau_s=self.tau_s))
        elif self.integrator.tau_s != self.tau_s:
            raise ValueError("integrator.tau_s must match the learner tau_s")

    def resolved_centers(self, dimension: int) -> np.ndarray:
        if self.centers is None:
            return np.zeros((1, dimension))
        if self.centers.shape[1] != dimension:
            raise ValueError(
                f"centers have dimension {self.centers.shape[1]} but the field has {dimension}"
            )
        return self.centers


@dataclass
class RunStats:
    counter_examples: int = 0
    samples: int = 0
    steps_simulated: int = 0
    k_doublings: int = 0
    wall_time: float = 0.0

    @property
    def avg_steps_per_sample(self) -> float:
        return self.steps_simulated / self.samples if self.samples else 0.0


@dataclass(frozen=True)
class RunEvent:
    """One counter-example: where it was found and which set it produced."""

    sample_index: int
    point: np.ndarray
    verdict: str
    snapshot_id: int


@dataclass(frozen=True)
class RunResult:
    final_set: object  # ApproxSet for a single center, MultiApprox otherwise
    stats: RunStats
    outcome: str
    event_log: tuple
    snapshots: tuple  # MultiApprox states; snapshots[0] is the initial set
    doublings_at: tuple  # sample indices at which k was doubled

    @property
    def converged(self) -> bool:
        return self.outcome == CONVERGED


def classify_sample(set_, field: VectorField, p, k: int, integrator: IntegratorConfig) -> TrajectoryOutcome:
    """Classify one sampled point against the current set. Divergence counts
    as a counter-example (see TrajectoryOutcome.is_counter_example)."""
    return sample_trajectory(field, p, k, integrator, set_)


def _initial_set(cfg: LearnerConfig, centers: np.ndarray, A: np.ndarray | None) -> MultiApprox:
    if cfg.family == sets.SPHERE:
        members = tuple(SphereSet(c, cfg.c) for c in centers)
    else:
        b0 = np.full(A.shape[0], cfg.c)
        members = tuple(PolytopeSet(c, A, b0) for c in centers)
    return MultiApprox(members)


def _member_weights(multi: MultiApprox, rng: np.random.Generator, old: np.ndarray | None, changed) -> np.ndarray:
    """Union-sampling weights; only changed members are re-estimated."""
    if old is None or changed is None:
        return sets.member_volumes(multi, rng, VOLUME_REFRESH_SAMPLES)
    weights = old.copy()
    for q in changed:
        m = multi.members[q]
        if m.is_failed:
            weights[q] = 0.0
        elif isinstance(m, SphereSet):
            weights[q] = sets.ball_volume(m.dimension, m.radius)
        else:
            weights[q] = sets.estimate_volume(m, rng, VOLUME_REFRESH_SAMPLES)
    return weights


def learn(cfg: LearnerConfig, field: VectorField, *, stop_when=None, progress=None) -> RunResult:
    """Run the full learning loop. All randomness derives from cfg.seed.

    stop_when: optional predicate on the current union, checked after every
    update (the ground-truth stop offered by recroa.groundtruth).
    progress: None writes one line per counter-example to stderr; False
    silences it; a callable receives each line.
    """
    if progress is None:
        progress = lambda line: print(line, file=sys.stderr)
    elif progress is False:
        progress = lambda line: None

    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    centers = cfg.resolved_centers(field.dimension)
    h = centers.shape[0]
    A = (
        generate_directions(cfg.n_directions, field.dimension, rng)
        if cfg.family == sets.POLYTOPE
        else None
    )

    current = _initial_set(cfg, centers, A)
    weights = _member_weights(current, rng, None, None) if h > 1 else None

    k = cfg.k
    stats = RunStats()
    events: list[RunEvent] = []
    snapshots: list[MultiApprox] = [current]
    doublings_at: list[int] = []
    consecutive = 0
    outcome = CONVERGED

    if stop_when is not None and stop_when(current):
        stats.wall_time = time.perf_counter() - t0
        return _result(cfg, current, stats, CONVERGED, events, snapshots, doublings_at)

    while consecutive < cfg.stop_after:
        if h > 1:
            p = sets.sample_uniform(current, rng, member_weights=weights)
        else:
            p = sets.sample_uniform(current.members[0], rng)
        stats.samples += 1
        out = classify_sample(current, field, p, k, cfg.integrator)
        stats.steps_simulated += out.states_visited
        if out.verdict == RECURRENT:
            consecutive += 1
            continue

        # counter-example (possibly by divergence): shrink and restart sampling
        stats.counter_examples += 1
        consecutive = 0
        before_mass = sets.offset_mass(current)
        changed = [q for q, m in enumerate(current.members) if sets.contains(m, p)]
        updated = sets.update_multi(current, p, cfg.epsilon, rng)
        events.append(RunEvent(stats.samples, p, out.verdict, len(snapshots)))
        snapshots.append(updated)
        progress(
            f"counter-example {stats.counter_examples} at sample {stats.samples}: "
            f"shrink {before_mass - sets.offset_mass(updated):.6g}"
        )

        if updated.is_failed:
            if stats.k_doublings >= cfg.k_doublings_max:
                outcome = FAILED_ALL_DOUBLINGS
                current = updated
                break
            stats.k_doublings += 1
            doublings_at.append(stats.samples)
            k *= 2
            current = _initial_set(cfg, centers, A)
            snapshots.append(current)
            weights = _member_weights(current, rng, None, None) if h > 1 else None
            progress(f"anchor member failed: doubling k to {k} and resetting the set")
            continue

        current = updated
        if h > 1:
            weights = _member_weights(current, rng, weights, changed)
        if stop_when is not None and stop_when(current):
            break

    stats.wall_time = time.perf_counter() - t0
    return _result(cfg, current, stats, outcome, events, snapshots, doublings_at)


def _result(cfg, current, stats, outcome, events, snapshots, doublings_at) -> RunResult:
    final = current.members[0] if len(current.members) == 1 else current
    return RunResult(
        final_set=final,
        stats=stats,
        outcome=outcome,
        event_log=tuple(events),
        snapshots=tuple(snapshots),
        doublings_at=tuple(doublings_at),
    )
