import numpy as np
import pytest

from recroa import IntegratorConfig, grid_classify, linear, make_grid_stop, parse_system, verify_recurrence
from recroa.groundtruth import compare
from recroa.sets import MultiApprox, PolytopeSet, SphereSet

AXES = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def classify_points(field, pts, icfg, T=30.0, tol=0.05):
    # one-point grids classify arbitrary points through the public API
    out = []
    for p in pts:
        bounds = [[p[i], p[i]] for i in range(len(p))]
        g = grid_classify(field, bounds, 1, T, tol, icfg)
        out.append(int(g.labels[0]))
    return out


def test_linear_grid_all_inside(lin2, icfg):
    g = grid_classify(lin2, [[-3, 3], [-3, 3]], 50, 30.0, 0.05, icfg)
    assert g.labels.size == 2500
    assert np.all(g.labels == 1)


def test_paper2d_known_points(field2d, icfg):
    s = np.sqrt(3.0)
    labels = classify_points(
        field2d,
        [(0.0, 0.0), (0.3, 0.3), (s, 0.0), (-s, 0.0), (2.5, 0.0), (3.0, 0.0)],
        icfg,
    )
    assert labels == [1, 1, 0, 0, 0, 0]


def test_unstable_1d_grid(icfg):
    f = parse_system(["x1"])
    g = grid_classify(f, [[-3.0, 3.0]], 7, 30.0, 0.05, icfg)
    # the only surviving point is the origin itself
    for p, label in zip(g.points[:, 0], g.labels):
        assert label == (1 if p == 0.0 else 0)


def test_grid_is_integrator_stable(field2d):
    a = grid_classify(field2d, [[-4, 4], [-4, 4]], 60, 30.0, 0.05, IntegratorConfig(0.5, 10))
    b = grid_classify(field2d, [[-4, 4], [-4, 4]], 60, 30.0, 0.05, IntegratorConfig(0.5, 20))
    flips = int((a.labels != b.labels).sum())
    assert flips <= 0.005 * a.labels.size


def test_verify_recurrence_invariant_ball(lin2, icfg):
    report = verify_recurrence(SphereSet(np.zeros(2), 1.0), lin2, 10, 0.5, 10_000, seed=3, integrator=icfg)
    assert report.ok
    assert report.violations == 0
    assert report.worst_point is None


def test_verify_recurrence_oversized_sphere(field2d, icfg):
    report = verify_recurrence(SphereSet(np.zeros(2), 3.0), field2d, 50, 0.5, 10_000, seed=3, integrator=icfg)
    assert report.violations > 0
    assert report.worst_point is not None
    assert np.linalg.norm(report.worst_point) <= 3.0


def test_verify_recurrence_failed_set_rejected(lin2, icfg):
    with pytest.raises(ValueError):
        verify_recurrence(SphereSet(np.zeros(2), -1.0), lin2, 10, 0.5, 100, seed=0, integrator=icfg)


def test_compare_whole_box(field2d, icfg):
    g = grid_classify(field2d, [[-4, 4], [-4, 4]], 40, 30.0, 0.05, icfg)
    whole = PolytopeSet(np.zeros(2), AXES, np.full(4, 4.0))
    m = compare(whole, g)
    assert m.coverage == 1.0
    assert m.false_inclusions == int((g.labels == 0).sum())


def test_compare_failed_set(field2d, icfg):
    g = grid_classify(field2d, [[-2, 2], [-2, 2]], 10, 30.0, 0.05, icfg)
    m = compare(SphereSet(np.zeros(2), -1.0), g)
    assert m.coverage == 0.0
    assert m.false_inclusions == 0


def test_compare_monotone_in_set_inclusion(field2d, icfg):
    g = grid_classify(field2d, [[-4, 4], [-4, 4]], 40, 30.0, 0.05, icfg)
    small = SphereSet(np.zeros(2), 1.0)
    large = SphereSet(np.zeros(2), 2.5)
    ms, ml = compare(small, g), compare(large, g)
    assert ms.coverage <= ml.coverage
    assert ms.false_inclusions <= ml.false_inclusions


def test_grid_stop_predicate(field2d, icfg):
    g = grid_classify(field2d, [[-4, 4], [-4, 4]], 40, 30.0, 0.05, icfg)
    stop = make_grid_stop(g)
    assert stop(SphereSet(np.zeros(2), 1.0))  # small ball excludes all outside points
    assert not stop(SphereSet(np.zeros(2), 3.0))


def test_grid_classify_validation(lin2, icfg):
    with pytest.raises(ValueError):
        grid_classify(lin2, [[-1, 1], [-1, 1]], 10, 0.0, 0.05, icfg)
    with pytest.raises(ValueError):
        grid_classify(lin2, [[-1, 1]], 10, 30.0, 0.05, icfg)  # wrong dimension


def test_multi_union_verify(lin2, icfg):
    m = MultiApprox((SphereSet(np.zeros(2), 1.0), SphereSet(np.array([0.5, 0.0]), 0.8)))
    report = verify_recurrence(m, lin2, 10, 0.5, 2000, seed=1, integrator=icfg)
    assert report.ok
