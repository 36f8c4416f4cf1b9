import numpy as np
import pytest

from recroa.sets import (
    DegenerateCounterexampleError,
    EpsilonPolicy,
    MultiApprox,
    PolytopeSet,
    SphereSet,
    check_epsilon_bound,
    contains,
    evenly_spaced_directions,
    generate_directions,
    membership_mask,
    offset_mass,
    update_multi,
    update_on_counterexample,
    update_polytope,
    update_sphere,
    verify_net,
)

AXES = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def box(b=1.0, center=(0.0, 0.0)):
    return PolytopeSet(np.array(center), AXES, np.full(4, b))


# ---------------------------------------------------------------------------
# membership


def test_sphere_contains():
    s = SphereSet(np.zeros(2), 1.0)
    assert contains(s, [0.5, 0.0])
    assert not contains(s, [1.5, 0.0])
    assert contains(s, [1.0, 0.0])  # boundary inclusive


def test_failed_sphere_is_empty():
    s = SphereSet(np.zeros(2), -0.1)
    assert s.is_failed
    assert not contains(s, [0.0, 0.0])


def test_box_polytope_contains():
    p = box(1.0)
    assert contains(p, [0.9, -0.9])
    assert not contains(p, [1.1, 0.0])


def test_failed_polytope_is_empty():
    p = PolytopeSet(np.zeros(2), AXES, np.array([-0.5, 2.0, 2.0, 2.0]))
    assert p.is_failed
    # the raw inequalities admit points, but a failed member counts as empty
    assert not contains(p, [-1.0, 0.0])


def test_multi_membership_is_union():
    m = MultiApprox((SphereSet(np.zeros(2), 0.5), SphereSet(np.array([2.0, 0.0]), 0.5)))
    assert contains(m, [0.1, 0.0])
    assert contains(m, [2.1, 0.0])
    assert not contains(m, [1.0, 0.0])


def test_multi_requires_anchor_at_origin():
    with pytest.raises(ValueError):
        MultiApprox((SphereSet(np.array([1.0, 0.0]), 0.5),))


def test_membership_mask_matches_contains(rng):
    sphere = SphereSet(np.zeros(2), 1.2)
    poly = box(0.8)
    multi = MultiApprox((sphere, SphereSet(np.array([1.0, 1.0]), 0.7)))
    pts = rng.uniform(-2, 2, (500, 2))
    for s in (sphere, poly, multi):
        mask = membership_mask(s, pts)
        for i in range(50):
            assert mask[i] == contains(s, pts[i])


def test_unit_norm_enforced():
    with pytest.raises(ValueError):
        PolytopeSet(np.zeros(2), np.array([[1.0, 1.0]]), np.array([1.0]))


# ---------------------------------------------------------------------------
# direction nets


def test_generate_directions_unit_rows():
    A = generate_directions(200, 2, seed=7)
    norms = np.sqrt((A * A).sum(axis=1))
    assert np.max(np.abs(norms - 1.0)) <= 1e-12
    assert A.shape == (200, 2)


def test_generate_directions_deterministic():
    assert np.array_equal(generate_directions(50, 3, seed=9), generate_directions(50, 3, seed=9))


def test_200_random_directions_pass_net_check():
    A = generate_directions(200, 2, seed=7)
    assert verify_net(A).passed


def test_three_fan_passes_at_boundary():
    A = evenly_spaced_directions(3)
    assert verify_net(A).passed


def test_two_axes_fail_with_witness_in_third_quadrant():
    A = np.array([[1.0, 0.0], [0.0, 1.0]])
    check = verify_net(A)
    assert not check.passed
    assert check.witness is not None
    assert check.witness[0] < 0 and check.witness[1] < 0
    assert (A @ check.witness).max() < 0.5


def test_net_check_monte_carlo_path_3d():
    bad = np.eye(3)
    assert not verify_net(bad, probes=2000, seed=1).passed
    good = generate_directions(600, 3, seed=3)
    assert verify_net(good, probes=2000, seed=1).passed


def test_net_projection_guarantee(rng):
    # any matrix passing the check projects every point to >= half its norm
    for n, seed in ((10, 21), (50, 4), (200, 7)):
        A = generate_directions(n, 2, seed=seed)
        if not verify_net(A).passed:
            continue
        pts = rng.uniform(-5, 5, (2000, 2))
        norms = np.sqrt((pts * pts).sum(axis=1))
        best = (pts @ A.T).max(axis=1)
        assert np.all(best >= norms / 2.0 - 1e-12)


# ---------------------------------------------------------------------------
# updates


def test_update_sphere_arithmetic():
    s = SphereSet(np.zeros(2), 1.5)
    p = np.array([1.2, 0.0])
    out = update_sphere(s, p, 0.1)
    assert abs(out.radius - 1.1) < 1e-15


def test_update_sphere_failure_rule():
    s = SphereSet(np.zeros(2), 0.05)
    out = update_sphere(s, np.array([0.05, 0.0]), 0.1)
    assert out.radius < 0
    assert out.is_failed


def test_update_sphere_excludes_point(rng):
    for _ in range(200):
        center = rng.uniform(-1, 1, 2)
        s = SphereSet(center, rng.uniform(0.5, 3.0))
        p = center + rng.uniform(-1, 1, 2) * s.radius / 2
        out = update_sphere(s, p, 0.1)
        assert not contains(out, p)


def test_update_polytope_aligned_direction():
    p = box(3.0)
    out = update_polytope(p, np.array([2.0, 0.0]), 0.1, np.random.default_rng(0))
    assert abs(out.offsets[0] - 1.9) < 1e-15
    assert np.array_equal(out.offsets[1:], p.offsets[1:])
    assert not contains(out, [2.0, 0.0])


def test_update_polytope_tie_break_is_uniform():
    rows = np.array([[1.0, 0.0], [0.0, 1.0]])
    base = PolytopeSet(np.zeros(2), rows, np.array([3.0, 3.0]))
    p = np.array([1.0, 1.0]) / np.sqrt(2.0)
    rng = np.random.default_rng(99)
    picks = np.zeros(2)
    trials = 10_000
    for _ in range(trials):
        out = update_polytope(base, p, 0.1, rng)
        picks[int(np.argmin(out.offsets))] += 1
    freqs = picks / trials
    assert abs(freqs[0] - 0.5) <= 0.05
    assert abs(freqs[1] - 0.5) <= 0.05


def test_update_polytope_degenerate_point():
    with pytest.raises(DegenerateCounterexampleError):
        update_polytope(box(1.0), np.zeros(2), 0.1, np.random.default_rng(0))


def test_update_multi_locality():
    m = MultiApprox((SphereSet(np.zeros(2), 0.5), SphereSet(np.array([3.0, 0.0]), 0.5)))
    p = np.array([3.1, 0.0])
    out = update_multi(m, p, 0.1, np.random.default_rng(0))
    assert out.members[0].radius == m.members[0].radius
    assert out.members[1].radius < m.members[1].radius
    assert not contains(out, p)


def test_update_multi_shrinks_all_containing():
    m = MultiApprox((SphereSet(np.zeros(2), 1.0), SphereSet(np.array([0.5, 0.0]), 1.0)))
    p = np.array([0.6, 0.0])
    out = update_multi(m, p, 0.1, np.random.default_rng(0))
    assert out.members[0].radius < 1.0
    assert out.members[1].radius < 1.0
    assert not contains(out.members[0], p)
    assert not contains(out.members[1], p)


def test_update_multi_member_may_vanish():
    m = MultiApprox((SphereSet(np.zeros(2), 1.0), SphereSet(np.array([2.0, 2.0]), 0.05)))
    p = np.array([2.0, 2.0]) + np.array([0.05, 0.0])
    out = update_multi(m, p, 0.1, np.random.default_rng(0))
    assert out.members[1].is_failed
    assert not out.is_failed  # anchor member survives, the run would continue


def test_update_properties_randomized(rng):
    # exclusion, monotone shrink, and the >= eps offset-mass decrease
    for _ in range(2000):
        eps = rng.uniform(0.01, 0.5)
        if rng.random() < 0.5:
            center = rng.uniform(-1, 1, 2)
            s = SphereSet(center, rng.uniform(0.2, 3.0))
            p = sample_inside_sphere(s, rng)
        else:
            A = generate_directions(12, 2, rng)
            s = PolytopeSet(rng.uniform(-1, 1, 2), A, rng.uniform(0.2, 3.0, 12))
            p = rejection_inside(s, rng)
            if p is None:
                continue
        out = update_on_counterexample(s, p, eps, rng)
        assert not contains(out, p)
        assert offset_mass(s) - offset_mass(out) >= eps - 1e-12
        # nested: everything in the updated set was in the original
        probe = rng.uniform(-4, 4, (100, 2))
        inner = membership_mask(out, probe)
        outer = membership_mask(s, probe)
        assert not np.any(inner & ~outer)


def sample_inside_sphere(s, rng):
    v = rng.standard_normal(2)
    v /= np.linalg.norm(v)
    return s.center + v * s.radius * np.sqrt(rng.random())


def rejection_inside(s, rng, tries=200):
    r = 2.0 * np.max(s.offsets)
    for _ in range(tries):
        p = s.center + rng.uniform(-r, r, 2)
        if contains(s, p) and np.linalg.norm(p - s.center) > 1e-9:
            return p
    return None


# ---------------------------------------------------------------------------
# epsilon policy


def test_epsilon_policy_requires_positive_margin():
    with pytest.raises(ValueError):
        EpsilonPolicy(epsilon=0.0)


def test_check_epsilon_bound():
    assert check_epsilon_bound(EpsilonPolicy(0.1, r=0.5, delta=0.1), "sphere") is True
    assert check_epsilon_bound(EpsilonPolicy(0.1, r=0.3, delta=0.1), "polytope") is False
    assert check_epsilon_bound(EpsilonPolicy(0.1), "sphere") is None
