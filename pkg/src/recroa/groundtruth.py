"""Reference classification of the state space by direct simulation.

A mesh of initial conditions is integrated for a fixed horizon; a point
belongs to the basin of the origin when its trajectory settles within a
small ball around it. The resulting labels serve as ground truth for
scoring learned sets and for the optional in-run stopping rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend, sets
from .dynamics import VectorField
from .integrate import IntegratorConfig, classify_batch

__all__ = [
    "GridClassification",
    "grid_classify",
    "RecurrenceReport",
    "verify_recurrence",
    "CompareMetrics",
    "compare",
    "make_grid_stop",
]

IN_ROA = 1
NOT_IN_ROA = 0


@dataclass(frozen=True, eq=False)
class GridClassification:
    bounds: np.ndarray  # (d, 2) per-axis [lo, hi]
    resolution: int  # points per axis
    points: np.ndarray  # (resolution**d, d), axis 0 slowest
    labels: np.ndarray  # int8, 1 = converges to the equilibrium
    horizon: float
    tol: float

    @property
    def dimension(self) -> int:
        return self.bounds.shape[0]

    def label_grid(self) -> np.ndarray:
        return self.labels.reshape((self.resolution,) * self.dimension)


def grid_points(bounds: np.ndarray, resolution: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, resolution) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def grid_classify(
    field: VectorField,
    bounds,
    resolution: int,
    T: float,
    tol: float,
    integrator: IntegratorConfig,
) -> GridClassification:
    """Integrate every grid point for time T and label it by convergence.

    A point exits early once it is within tol of the equilibrium at two
    consecutive sampling instants; divergent points are labeled outside.
    """
    if not (T > 0 and tol > 0):
        raise ValueError("T and tol must be positive")
    bounds = np.asarray(bounds, dtype=np.float64)
    if bounds.ndim != 2 or bounds.shape != (field.dimension, 2):
        raise ValueError(f"bounds must have shape ({field.dimension}, 2)")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    pts = np.ascontiguousarray(grid_points(bounds, resolution))
    n_steps = math.ceil(T / integrator.tau_s)
    p = field.program
    labels = backend.kernels().grid_labels(
        p.code,
        p.iarg,
        p.farg,
        p.starts,
        p.stack_size,
        pts,
        n_steps,
        integrator.substeps,
        integrator.h,
        tol,
        integrator.r_max,
        np.zeros(field.dimension),
    )
    return GridClassification(
        bounds=bounds,
        resolution=int(resolution),
        points=pts,
        labels=np.asarray(labels, dtype=np.int8),
        horizon=float(T),
        tol=float(tol),
    )


@dataclass(frozen=True)
class RecurrenceReport:
    violations: int
    worst_point: np.ndarray | None
    probes: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def verify_recurrence(
    set_,
    field: VectorField,
    k: int,
    tau_s: float,
    n_probe: int,
    seed,
    integrator: IntegratorConfig | None = None,
) -> RecurrenceReport:
    """Statistical recurrence certificate: sample n_probe points uniformly
    in the set and classify each; every counter-example is a violation.
    The worst point is the violating probe farthest from the equilibrium."""
    failed = set_.is_failed if not isinstance(set_, sets.MultiApprox) else not set_.alive()
    if failed:
        raise ValueError("cannot verify a failed set")
    if integrator is None:
        integrator = IntegratorConfig(tau_s=tau_s)
    elif integrator.tau_s != tau_s:
        raise ValueError("integrator.tau_s must match tau_s")
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    probes = sets.sample_uniform(set_, rng, size=int(n_probe))
    kn = backend.kernels()
    verdicts, _ = classify_batch(field, probes, k, integrator, set_)
    bad = verdicts != kn.VERDICT_RECURRENT
    violations = int(bad.sum())
    worst = None
    if violations:
        offenders = probes[bad]
        worst = offenders[int(np.argmax(np.sqrt((offenders * offenders).sum(axis=1))))]
    return RecurrenceReport(violations=violations, worst_point=worst, probes=int(n_probe))


@dataclass(frozen=True)
class CompareMetrics:
    false_inclusions: int  # outside-basin grid points contained in the set
    coverage: float  # fraction of basin grid points contained


def compare(set_, grid: GridClassification) -> CompareMetrics:
    """Score a set against the grid ground truth."""
    if set_.dimension != grid.dimension:
        raise ValueError("set and grid dimensions differ")
    inside = sets.membership_mask(set_, grid.points)
    in_roa = grid.labels == IN_ROA
    false_inclusions = int(np.count_nonzero(inside & ~in_roa))
    total_roa = int(np.count_nonzero(in_roa))
    coverage = float(np.count_nonzero(inside & in_roa)) / total_roa if total_roa else 0.0
    return CompareMetrics(false_inclusions=false_inclusions, coverage=coverage)


def make_grid_stop(grid: GridClassification):
    """Stopping rule that ends a run once every outside-basin grid point is
    excluded from the current approximation."""

    def stop(current) -> bool:
        return compare(current, grid).false_inclusions == 0

    return stop
