"""Parametric approximation families and their counter-example updates.

Two families: spheres {x : ||x - c|| <= b} and polytopes
{x : A(x - c) <= b} with a fixed matrix of unit exploration directions,
plus unions of several members (the multi-center approximation).

A negative offset encodes failure: the set is then empty and membership
is false everywhere. Sets are immutable; updates return new values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SphereSet",
    "PolytopeSet",
    "MultiApprox",
    "EpsilonPolicy",
    "NetCheck",
    "SamplingError",
    "DegenerateCounterexampleError",
    "contains",
    "membership_mask",
    "generate_directions",
    "evenly_spaced_directions",
    "verify_net",
    "update_sphere",
    "update_polytope",
    "update_on_counterexample",
    "update_multi",
    "sample_uniform",
    "estimate_volume",
    "member_volumes",
    "ball_volume",
    "bounding_box",
    "offset_mass",
    "check_epsilon_bound",
]

UNIT_TOL = 1e-12  # allowed deviation of direction rows from unit norm
NET_SLACK = 1e-12  # float slack for nets that touch the coverage bound exactly
REJECTION_BUDGET = 10**6  # max draws per requested point before sampling gives up

SPHERE = "sphere"
POLYTOPE = "polytope"


class SamplingError(RuntimeError):
    """Rejection sampling exhausted its draw budget."""


class DegenerateCounterexampleError(ValueError):
    """Counter-example coincides with the set center: update angle undefined."""


@dataclass(frozen=True, eq=False)
class SphereSet:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.ascontiguousarray(self.center, dtype=np.float64)
        if center.ndim != 1 or not np.all(np.isfinite(center)):
            raise ValueError("center must be a finite vector")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    @property
    def is_failed(self) -> bool:
        return self.radius < 0

    @property
    def family(self) -> str:
        return SPHERE

    def _membership_arrays(self):
        return (SPHERE, self.center[None, :], np.array([self.radius]))


@dataclass(frozen=True, eq=False)
class PolytopeSet:
    center: np.ndarray
    directions: np.ndarray  # (n, d), unit rows
    offsets: np.ndarray  # (n,)

    def __post_init__(self):
        center = np.ascontiguousarray(self.center, dtype=np.float64)
        A = np.ascontiguousarray(self.directions, dtype=np.float64)
        b = np.ascontiguousarray(self.offsets, dtype=np.float64)
        if center.ndim != 1 or not np.all(np.isfinite(center)):
            raise ValueError("center must be a finite vector")
        if A.ndim != 2 or A.shape[1] != center.shape[0]:
            raise ValueError("directions must be an (n, d) matrix matching the center")
        if b.shape != (A.shape[0],):
            raise ValueError("offsets must have one entry per direction")
        norms = np.sqrt((A * A).sum(axis=1))
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ValueError("every direction row must have unit Euclidean norm")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "directions", A)
        object.__setattr__(self, "offsets", b)

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    @property
    def is_failed(self) -> bool:
        return bool(np.any(self.offsets < 0))

    @property
    def family(self) -> str:
        return POLYTOPE

    def _membership_arrays(self):
        return (POLYTOPE, self.center[None, :], self.directions, self.offsets[None, :])


ApproxSet = SphereSet | PolytopeSet


@dataclass(frozen=True, eq=False)
class MultiApprox:
    """Union of same-family members; member 1 is anchored at the equilibrium
    (the origin) and is the only member whose failure fails the union."""

    members: tuple
    family: str = field(default="")

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("at least one member required")
        fam = members[0].family
        if any(m.family != fam for m in members):
            raise ValueError("all members must share one family")
        d = members[0].dimension
        if any(m.dimension != d for m in members):
            raise ValueError("all members must share one dimension")
        if np.any(members[0].center != 0.0):
            raise ValueError("member 1 must be centered at the equilibrium (origin)")
        if fam == POLYTOPE:
            A0 = members[0].directions
            if any(m.directions is not A0 and not np.array_equal(m.directions, A0) for m in members):
                raise ValueError("polytope members must share one direction matrix")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "family", fam)

    @property
    def dimension(self) -> int:
        return self.members[0].dimension

    @property
    def is_failed(self) -> bool:
        return self.members[0].is_failed

    def alive(self) -> list[int]:
        return [q for q, m in enumerate(self.members) if not m.is_failed]

    def _membership_arrays(self):
        centers = np.ascontiguousarray(np.stack([m.center for m in self.members]))
        if self.family == SPHERE:
            radii = np.array([m.radius for m in self.members])
            return (SPHERE, centers, radii)
        A = self.members[0].directions
        B = np.ascontiguousarray(np.stack([m.offsets for m in self.members]))
        return (POLYTOPE, centers, A, B)


@dataclass(frozen=True)
class EpsilonPolicy:
    """Shrink margin, with the optional theory constants needed to check it."""

    epsilon: float
    r: float | None = None
    delta: float | None = None

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError("epsilon must be positive")


# ---------------------------------------------------------------------------
# Membership


def contains(set_, p) -> bool:
    """Point membership; failed sets contain nothing."""
    p = np.asarray(p, dtype=np.float64)
    if isinstance(set_, MultiApprox):
        return any(contains(m, p) for m in set_.members)
    if set_.is_failed:
        return False
    diff = p - set_.center
    if isinstance(set_, SphereSet):
        return bool(np.sqrt(np.sum(diff * diff)) <= set_.radius)
    return bool(np.all(set_.directions @ diff <= set_.offsets))


def membership_mask(set_, points: np.ndarray) -> np.ndarray:
    """Vectorized membership over rows of points (m, d)."""
    points = np.asarray(points, dtype=np.float64)
    if isinstance(set_, MultiApprox):
        return containing_counts(set_, points) > 0
    if set_.is_failed:
        return np.zeros(points.shape[0], dtype=bool)
    diff = points - set_.center
    if isinstance(set_, SphereSet):
        return np.sqrt(np.sum(diff * diff, axis=1)) <= set_.radius
    return np.all(diff @ set_.directions.T <= set_.offsets, axis=1)


def containing_counts(multi: MultiApprox, points: np.ndarray) -> np.ndarray:
    """How many (non-failed) members contain each point; vectorized across
    members, which is what keeps union sampling cheap for many centers."""
    points = np.asarray(points, dtype=np.float64)
    diff = points[:, None, :] - np.stack([m.center for m in multi.members])[None, :, :]
    if multi.family == SPHERE:
        radii = np.array([m.radius for m in multi.members])
        hits = np.sqrt(np.sum(diff * diff, axis=2)) <= radii[None, :]
    else:
        A = multi.members[0].directions
        B = np.stack([m.offsets for m in multi.members])
        proj = np.einsum("mhd,ld->mhl", diff, A)
        hits = np.all(proj <= B[None, :, :], axis=2)
        hits &= np.array([not m.is_failed for m in multi.members])[None, :]
    return hits.sum(axis=1)


# ---------------------------------------------------------------------------
# Exploration directions and the coverage check


def generate_directions(n: int, d: int, seed) -> np.ndarray:
    """n unit rows drawn uniformly on the unit sphere in R^d; deterministic
    per seed (seed may be an int or a Generator)."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    rows = rng.standard_normal((n, d))
    norms = np.sqrt((rows * rows).sum(axis=1))
    while np.any(norms < 1e-12):  # essentially never; keep rows well defined
        bad = norms < 1e-12
        rows[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.sqrt((rows * rows).sum(axis=1))
    return rows / norms[:, None]


def evenly_spaced_directions(n: int, phase: float = 0.0) -> np.ndarray:
    """n planar directions at equal angular spacing (d=2 only). The n=3 fan
    meets the coverage bound exactly."""
    angles = phase + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(angles), np.sin(angles)])


@dataclass(frozen=True)
class NetCheck:
    passed: bool
    witness: np.ndarray | None = None


def verify_net(A: np.ndarray, probes: int = 10_000, seed=0) -> NetCheck:
    """Check that every unit direction v has max_l a_l . v >= 1/2.

    In d=2 the check is exact via sorted angular gaps (pass iff the largest
    gap is at most 2*pi/3, boundary inclusive); in higher dimensions it is
    Monte Carlo over `probes` random unit vectors. On failure the witness
    is a violating direction.
    """
    A = np.asarray(A, dtype=np.float64)
    norms = np.sqrt((A * A).sum(axis=1))
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError("rows must have unit norm")
    d = A.shape[1]
    if d == 2:
        angles = np.sort(np.arctan2(A[:, 1], A[:, 0]))
        gaps = np.diff(angles, append=angles[0] + 2.0 * np.pi)
        worst = int(np.argmax(gaps))
        if gaps[worst] <= 2.0 * np.pi / 3.0 + NET_SLACK:
            return NetCheck(True)
        mid = angles[worst] + gaps[worst] / 2.0
        return NetCheck(False, np.array([np.cos(mid), np.sin(mid)]))
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    vs = generate_directions(probes, d, rng)
    best = (vs @ A.T).max(axis=1)
    bad = best < 0.5 - NET_SLACK
    if not bad.any():
        return NetCheck(True)
    return NetCheck(False, vs[int(np.argmax(bad))])


# ---------------------------------------------------------------------------
# Counter-example updates


def update_sphere(set_: SphereSet, p, eps: float) -> SphereSet:
    """Shrink the radius to ||p - c|| - eps; negative radius marks failure."""
    p = np.asarray(p, dtype=np.float64)
    diff = p - set_.center
    return SphereSet(set_.center, float(np.sqrt(np.sum(diff * diff))) - eps)


def update_polytope(set_: PolytopeSet, p, eps: float, rng: np.random.Generator) -> PolytopeSet:
    """Tighten the offset of the direction best aligned with p - c.

    Ties on the alignment score are broken uniformly at random via rng.
    """
    p = np.asarray(p, dtype=np.float64)
    diff = p - set_.center
    nrm = float(np.sqrt(np.sum(diff * diff)))
    if nrm == 0.0:
        raise DegenerateCounterexampleError("counter-example equals the set center")
    proj = set_.directions @ diff
    scores = proj / nrm
    best = scores.max()
    candidates = np.flatnonzero(scores == best)
    l_star = int(candidates[0]) if candidates.size == 1 else int(candidates[rng.integers(candidates.size)])
    offsets = set_.offsets.copy()
    offsets[l_star] = proj[l_star] - eps
    return PolytopeSet(set_.center, set_.directions, offsets)


def update_on_counterexample(set_, p, eps: float, rng: np.random.Generator | None = None):
    if isinstance(set_, SphereSet):
        return update_sphere(set_, p, eps)
    if isinstance(set_, PolytopeSet):
        if rng is None:
            raise ValueError("polytope updates need an rng for tie-breaking")
        return update_polytope(set_, p, eps, rng)
    raise TypeError(f"unsupported set type {type(set_).__name__}")


def update_multi(multi: MultiApprox, p, eps: float, rng: np.random.Generator) -> MultiApprox:
    """Update every member containing p by its family rule; members may fail
    individually without failing the union (only member 1 does that)."""
    p = np.asarray(p, dtype=np.float64)
    members = list(multi.members)
    for q, m in enumerate(members):
        if contains(m, p):
            members[q] = update_on_counterexample(m, p, eps, rng)
    return MultiApprox(tuple(members))


def offset_mass(set_) -> float:
    """Total offset mass: radius, sum of polytope offsets, or the sum over
    members. Each counter-example update decreases it by at least eps."""
    if isinstance(set_, MultiApprox):
        return float(sum(offset_mass(m) for m in set_.members))
    if isinstance(set_, SphereSet):
        return float(set_.radius)
    return float(np.sum(set_.offsets))


# ---------------------------------------------------------------------------
# Uniform sampling and volume


def ball_volume(d: int, radius: float) -> float:
    if radius < 0:
        return 0.0
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * radius**d


def bounding_box(set_) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned box certain to contain the set. For polytopes this is
    center +- 2*max(b): the coverage condition on the directions forces
    ||x - c|| <= 2 * max_l b_l for every member x."""
    if isinstance(set_, MultiApprox):
        boxes = [bounding_box(m) for m in set_.members if not m.is_failed]
        if not boxes:
            raise ValueError("all members failed; no bounding box")
        los = np.min(np.stack([lo for lo, _ in boxes]), axis=0)
        his = np.max(np.stack([hi for _, hi in boxes]), axis=0)
        return los, his
    if set_.is_failed:
        raise ValueError("failed set has no bounding box")
    if isinstance(set_, SphereSet):
        r = set_.radius
    else:
        r = 2.0 * float(np.max(set_.offsets))
    return set_.center - r, set_.center + r


def _sample_ball(center: np.ndarray, radius: float, rng: np.random.Generator, m: int) -> np.ndarray:
    d = center.shape[0]
    dirs = rng.standard_normal((m, d))
    norms = np.sqrt((dirs * dirs).sum(axis=1))
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        dirs[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.sqrt((dirs * dirs).sum(axis=1))
    radii = radius * rng.random(m) ** (1.0 / d)
    return center + dirs / norms[:, None] * radii[:, None]


def _sample_box(lo: np.ndarray, hi: np.ndarray, rng: np.random.Generator, m: int) -> np.ndarray:
    return lo + (hi - lo) * rng.random((m, lo.shape[0]))


def _sample_member(member, rng: np.random.Generator, m: int, budget: list) -> np.ndarray:
    if isinstance(member, SphereSet):
        budget[0] -= m
        return _sample_ball(member.center, member.radius, rng, m)
    lo, hi = bounding_box(member)
    out = np.empty((m, member.dimension))
    got = 0
    while got < m:
        want = max(2 * (m - got), 64)
        if budget[0] <= 0:
            raise SamplingError("rejection sampling exhausted its draw budget")
        want = min(want, max(budget[0], 1))
        budget[0] -= want
        cand = _sample_box(lo, hi, rng, want)
        hits = cand[membership_mask(member, cand)]
        take = min(hits.shape[0], m - got)
        out[got : got + take] = hits[:take]
        got += take
    return out


def sample_uniform(set_, rng: np.random.Generator, size: int | None = None, member_weights=None):
    """Exactly uniform draws from the set.

    Spheres use the polar method; polytopes use rejection from the bounding
    box. Unions pick a member proportionally to volume (weights may be
    passed in to avoid re-estimation), draw inside it, and accept with
    probability 1/(number of members containing the draw).
    """
    single = size is None
    m = 1 if single else int(size)
    if isinstance(set_, MultiApprox):
        if not set_.alive():
            raise ValueError("cannot sample from a fully failed union")
        if member_weights is None:
            member_weights = member_volumes(set_, rng)
        weights = np.array(member_weights, dtype=np.float64, copy=True)
        if weights.shape != (len(set_.members),):
            raise ValueError("member_weights must have one entry per member")
        for q, member in enumerate(set_.members):
            if member.is_failed:
                weights[q] = 0.0  # stale weights must never select a dead member
        total = weights.sum()
        if not (total > 0):
            raise ValueError("member weights must have positive total")
        probs = weights / total
        out = np.empty((m, set_.dimension))
        got = 0
        budget = [REJECTION_BUDGET * m]
        while got < m:
            want = max(m - got, 1)
            if budget[0] <= 0:
                raise SamplingError("rejection sampling exhausted its draw budget")
            picks = rng.choice(len(set_.members), size=want, p=probs)
            draws = np.empty((want, set_.dimension))
            for q in np.unique(picks):
                sel = picks == q
                draws[sel] = _sample_member(set_.members[q], rng, int(sel.sum()), budget)
            counts = containing_counts(set_, draws)
            accept = rng.random(want) < 1.0 / counts
            take = min(int(accept.sum()), m - got)
            out[got : got + take] = draws[accept][:take]
            got += take
        return out[0] if single else out
    if set_.is_failed:
        raise ValueError("cannot sample from a failed set")
    out = _sample_member(set_, rng, m, [REJECTION_BUDGET * m])
    return out[0] if single else out


def member_volumes(multi: MultiApprox, rng: np.random.Generator, n_samples: int = 4096) -> np.ndarray:
    """Per-member volumes for union sampling: closed form for balls,
    Monte Carlo for polytopes. Failed members get volume 0."""
    vols = np.zeros(len(multi.members))
    for q, member in enumerate(multi.members):
        if member.is_failed:
            continue
        if isinstance(member, SphereSet):
            vols[q] = ball_volume(member.dimension, member.radius)
        else:
            vols[q] = estimate_volume(member, rng, n_samples)
    return vols


def estimate_volume(set_, rng: np.random.Generator, n_samples: int) -> float:
    """Monte Carlo volume: hit ratio over the bounding box times box volume.
    Seeded and deterministic; a failed set has volume 0."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    failed = set_.is_failed if not isinstance(set_, MultiApprox) else not set_.alive()
    if failed:
        return 0.0
    lo, hi = bounding_box(set_)
    pts = _sample_box(lo, hi, rng, int(n_samples))
    hits = int(membership_mask(set_, pts).sum())
    box_vol = float(np.prod(hi - lo))
    return hits / float(n_samples) * box_vol


# ---------------------------------------------------------------------------
# Shrink-margin admissibility (advisory: the theory constants are rarely known)


def check_epsilon_bound(policy: EpsilonPolicy, family: str) -> bool | None:
    """True/False when policy.r and policy.delta are known, else None."""
    if policy.r is None or policy.delta is None:
        return None
    if family == SPHERE:
        return policy.epsilon <= policy.r - policy.delta
    if family == POLYTOPE:
        return policy.epsilon <= policy.r / 2.0 - policy.delta
    raise ValueError(f"unknown family {family!r}")
