import numpy as np
import pytest

from busecoarse.coarse import (
    SampledMap,
    closeness,
    coarseness_profile,
    continuity_spot_check,
    continuous_approximation,
    image_diameter_bound,
    approximation_bound_check,
    sample_map,
)
from busecoarse.complexes import BarycentricPoint, SimplicialComplex
from busecoarse.errors import DomainError, PreconditionError
from busecoarse.spaces import distance, glued_xp, lp_space
from oracles import lp_barycenter_2d

L1 = lp_space(2, 1)
L2 = lp_space(2, 2)
L3 = lp_space(3, 2)


def _cloud(n=80, seed=0):
    rng = np.random.default_rng(seed)
    return [L2.point(*v) for v in rng.uniform(-5, 5, (n, 2))]


def test_identity_profile():
    f = sample_map(L2, _cloud(), lambda a: a, L2)
    prof = coarseness_profile(f, [1.0, 2.0, 4.0])
    for R, S in prof.rows:
        assert S <= R
    assert prof.proper and prof.witness is None


def test_scaling_profile():
    pts = [L1.point(x) for x in np.linspace(-10, 10, 101)]
    f = sample_map(L1, pts, lambda a: L1.point(2 * a.coords[0]), L1)
    for R, S in coarseness_profile(f, [0.5, 1.0, 3.0]).rows:
        assert S <= 2 * R + 1e-12


def test_collapse_is_not_proper():
    pts = [L2.point(x, 0) for x in range(40)]
    f = sample_map(L2, pts, lambda a: L2.point(0, 0), L2)
    prof = coarseness_profile(f, [1.0])
    assert not prof.proper
    assert prof.witness["distance"] >= prof.extent / 2
    assert prof.preimage_bounds[1.0] == 39.0


def test_profile_errors():
    f = sample_map(L2, [L2.point(0, 0)], lambda a: a, L2)
    with pytest.raises(DomainError):
        coarseness_profile(f, [2.0, 1.0])
    with pytest.raises(PreconditionError):
        coarseness_profile(SampledMap((), (), L2, L2), [1.0])
    with pytest.raises(PreconditionError):
        SampledMap((1, 2), (L2.point(0, 0),), L2)


def test_closeness_examples():
    pts = _cloud(30)
    f = sample_map(L2, pts, lambda a: a, L2)
    assert closeness(f, f).C == 0
    g = sample_map(L2, pts, lambda a: L2.point(a.coords[0] + 1, a.coords[1]), L2)
    assert closeness(f, g).C == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(PreconditionError):
        closeness(f, sample_map(L2, pts[:-1], lambda a: a, L2))


def test_closeness_preserves_coarseness():
    rng = np.random.default_rng(3)
    pts = _cloud(60, seed=3)
    wiggle = {a: rng.normal(size=2) for a in pts}
    C = 0.7
    f = sample_map(L2, pts, lambda a: L2.point(*(2 * np.array(a.coords))), L2)
    g = sample_map(
        L2, pts, lambda a: L2.point(*(2 * np.array(a.coords) + C * wiggle[a] / np.linalg.norm(wiggle[a]))), L2
    )
    c = closeness(f, g).C
    radii = [0.5, 1.0, 2.0, 5.0]
    for (R, Sf), (_, Sg) in zip(coarseness_profile(f, radii).rows, coarseness_profile(g, radii).rows):
        assert Sg <= Sf + 2 * c + 1e-12


def test_edge_midpoint_and_vertices():
    edge = SimplicialComplex.from_simplices(2, [(0, 1)])
    vm = [L2.point(0, 0), L2.point(2, 0)]
    ys = [BarycentricPoint((0, 1), (0.5, 0.5)), BarycentricPoint.vertex(0), BarycentricPoint.vertex(1)]
    approx = continuous_approximation(edge, vm, ys, L2)
    assert approx.g.values == (L2.point(1, 0), vm[0], vm[1])
    assert approx.f.values[1:] == (vm[0], vm[1])


def test_triangle_in_l3():
    tri = SimplicialComplex.from_simplices(3, [(0, 1, 2)])
    vm = [L3.point(0, 0), L3.point(1, 0), L3.point(0.5, 0.9)]
    assert image_diameter_bound(vm, [(0, 1, 2)], L3) == pytest.approx(1.0)
    rng = np.random.default_rng(4)
    ys = [BarycentricPoint((0, 1, 2), tuple(w)) for w in rng.dirichlet(np.ones(3), 50)]
    rep = approximation_bound_check(tri, vm, ys, L3)
    assert rep.passed
    assert rep.stats["max_nearest_vertex_distance"] < 1.0
    assert rep.stats["max_distance_to_f"] < 2.0
    approx = continuous_approximation(tri, vm, ys[:5], L3)
    for y, g in zip(ys[:5], approx.g.values):
        ref = lp_barycenter_2d([v.coords for v in vm], list(y.weights), 3.0)
        assert np.allclose(g.coords, ref, atol=1e-5)


def test_closeness_of_approximation_within_twice_the_diameter():
    rng = np.random.default_rng(5)
    cx = SimplicialComplex.from_simplices(4, [(0, 1, 2), (1, 2, 3)])
    vm = [L2.point(*v) for v in rng.uniform(-2, 2, (4, 2))]
    ys = [BarycentricPoint((1, 2, 3), tuple(w)) for w in rng.dirichlet(np.ones(3), 30)]
    approx = continuous_approximation(cx, vm, ys, L2)
    C = image_diameter_bound(vm, [y.simplex for y in ys], L2)
    assert closeness(approx.f, approx.g).C <= 2 * C + 1e-6


def test_cross_block_images_reported_per_point():
    X = glued_xp(2)
    edge = SimplicialComplex.from_simplices(3, [(0, 1), (1, 2)])
    vm = [X.block(2, (1, 0)), X.block(2, (0, 1)), X.block(3, (1, 1, 1))]
    ys = [BarycentricPoint((0, 1), (0.5, 0.5)), BarycentricPoint((1, 2), (0.5, 0.5))]
    approx = continuous_approximation(edge, vm, ys, X)
    assert approx.indices == [0] and set(approx.errors) == {1}


def test_approximation_rejects_missing_simplex():
    edge = SimplicialComplex.from_simplices(3, [(0, 1)])
    vm = [L2.point(0, 0), L2.point(1, 0), L2.point(2, 0)]
    with pytest.raises(PreconditionError):
        continuous_approximation(edge, vm, [BarycentricPoint((1, 2), (0.5, 0.5))], L2)
    with pytest.raises(PreconditionError):
        continuous_approximation(edge, vm[:2], [BarycentricPoint.vertex(0)], L2)


def test_continuity_spot_check():
    tri = SimplicialComplex.from_simplices(3, [(0, 1, 2)])
    vm = [L3.point(0, 0), L3.point(4, 0), L3.point(0, 3)]
    y = BarycentricPoint((0, 1, 2), (0.2, 0.3, 0.5))
    ratios = [continuity_spot_check(tri, vm, y, L3, h=h) for h in (1e-2, 1e-3, 1e-4)]
    # the difference quotient stays bounded as h shrinks
    assert max(ratios) < 2 * distance(L3, vm[1], vm[2])
