import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from busecoarse.boundary import (
    busemann_contraction_bound,
    compactified_from_json,
    contraction,
    contraction_radius,
    in_ray_end_neighborhood,
    project,
    project_between,
    ray_end,
    ray_point,
    sphere_direction,
)
from busecoarse.errors import DomainError, InvalidPointError, PreconditionError
from busecoarse.sampling import random_direction, random_point
from busecoarse.spaces import basepoint, distance, glued_xp, half_line, lp_space
from strategies import space_and_points

L2 = lp_space(2, 2)
X2 = glued_xp(2)


def test_project_examples():
    o = L2.point(0, 0)
    p = project(L2, o, 1, L2.point(3, 4))
    assert p.coords == pytest.approx((0.6, 0.8), abs=1e-15)
    a = L2.point(0.3, -0.2)
    assert project(L2, o, 1, a) == a
    xi = sphere_direction(5, (1, 0, 0, 0, 0), 2)
    assert project(X2, X2.ray(0), 3, xi) == X2.ray(3)
    assert project(X2, X2.ray(0), 6, xi) == X2.block(5, (1, 0, 0, 0, 0))


def test_project_rejects_nonpositive_radius():
    with pytest.raises(DomainError):
        project(L2, None, 0, L2.point(1, 1))


def test_project_between_examples_and_errors():
    o = L2.point(0, 0)
    assert project_between(L2, o, 1, 2, L2.point(2, 0)) == L2.point(1, 0)
    a = L2.point(0.5, 0.5)
    assert project_between(L2, o, 1, 2, a) == a
    with pytest.raises(DomainError):
        project_between(L2, o, 2, 2, a)
    with pytest.raises(PreconditionError):
        project_between(L2, o, 1, 2, L2.point(5, 0))


def test_contraction_examples():
    o = L2.point(0, 0)
    xi = sphere_direction(2, (1, 0), 2)
    assert contraction(L2, o, xi, 0.5) == L2.point(1, 0)
    assert contraction(L2, o, xi, 1.0) == o
    assert contraction(L2, o, xi, 0.0) == xi
    a = L2.point(4, -7)
    assert contraction(L2, o, a, 0.0) == a
    assert contraction_radius(0.5) == 1.0 and contraction_radius(0) == math.inf
    with pytest.raises(DomainError):
        contraction(L2, o, a, 1.5)


def test_contraction_continuity_in_s():
    rng = np.random.default_rng(2)
    for space in (L2, X2, half_line()):
        o = basepoint(space)
        for _ in range(30):
            a = random_point(space, rng, scale=20)
            for s in rng.uniform(0.05, 0.95, 5):
                h = 1e-7
                assert distance(space, contraction(space, o, a, s), contraction(space, o, a, s + h)) < 1e-3


def test_contraction_radius_recedes_to_the_boundary():
    # as s -> 0 the image of a boundary point leaves every ball
    xi = ray_end()
    for s in (0.1, 0.01, 0.001):
        z = contraction(X2, None, xi, s)
        assert distance(X2, X2.ray(0), z) == pytest.approx(contraction_radius(s))
        assert in_ray_end_neighborhood(X2, z, int(contraction_radius(s)) - 1)


def test_contraction_bound_examples():
    o = L2.point(0, 0)
    r = busemann_contraction_bound(L2, o, L2.point(4, 0), L2.point(0, 4), 2)
    assert r.lhs == pytest.approx(2 * math.sqrt(2))
    assert r.rhs == pytest.approx(2 * math.sqrt(2))
    assert abs(r.margin) < 1e-12 and r.passed
    a = L2.point(3, 3)
    r = busemann_contraction_bound(L2, o, a, a, 1)
    assert r.lhs == 0 and r.rhs == 0
    with pytest.raises(PreconditionError):
        busemann_contraction_bound(L2, o, L2.point(1, 0), L2.point(5, 0), 2)


def test_contraction_bound_sweep():
    S = lp_space(3, 3)
    rng = np.random.default_rng(0)
    o = basepoint(S)
    worst = math.inf
    for _ in range(2000):
        a, b = random_point(S, rng, scale=10), random_point(S, rng, scale=10)
        r = min(distance(S, o, a), distance(S, o, b))
        worst = min(worst, busemann_contraction_bound(S, o, a, b, r * rng.uniform(0.01, 1)).margin)
    assert worst >= -1e-9


def test_boundary_points():
    xi = sphere_direction(2, (3, 4), 2)
    assert xi.direction == pytest.approx((0.6, 0.8))
    assert xi.renormalize(2).renormalize(2) == xi.renormalize(2)
    with pytest.raises(InvalidPointError):
        sphere_direction(2, (0, 0), 2)
    with pytest.raises(InvalidPointError):
        project(L2, None, 1, ray_end())
    assert compactified_from_json(X2, {"tag": "ray_end"}) == ray_end()
    assert compactified_from_json(X2, {"tag": "sphere", "n": 2, "dir": [0.6, 0.8]}) == xi
    assert xi.to_json() == {"tag": "sphere", "n": 2, "dir": [0.6, 0.8]}


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3).filter(lambda v: any(abs(c) > 1e-3 for c in v)))
def test_renormalize_is_idempotent(v):
    xi = sphere_direction(3, v, 3)
    assert xi.renormalize(3) == xi


def test_ray_end_neighbourhoods():
    assert in_ray_end_neighborhood(X2, sphere_direction(7, [1] * 7, 2), 5)
    assert not in_ray_end_neighborhood(X2, sphere_direction(3, [1] * 3, 2), 5)
    assert in_ray_end_neighborhood(X2, ray_end(), 100)
    assert in_ray_end_neighborhood(X2, X2.ray(5.5), 5)


def test_ray_points_have_exact_distance():
    rng = np.random.default_rng(5)
    for space in (L2, lp_space(1.5, 3), X2, half_line()):
        o = random_point(space, rng)
        for _ in range(50):
            xi = random_direction(space, rng)
            t = rng.uniform(0, 20)
            assert distance(space, o, ray_point(space, o, xi, t)) == pytest.approx(t, abs=1e-9)


def _coherence_deviation(space, rng, n):
    o = basepoint(space)
    worst = 0.0
    for _ in range(n):
        s, t, u = np.sort(rng.uniform(0.1, 10, 3))
        z = random_point(space, rng, scale=15) if rng.random() < 0.7 else random_direction(space, rng)
        direct = project(space, o, s, z)
        worst = max(worst, distance(space, project_between(space, o, s, t, project(space, o, t, z)), direct))
        a = project(space, o, u, z)
        chained = project_between(space, o, s, t, project_between(space, o, t, u, a))
        worst = max(worst, distance(space, chained, project_between(space, o, s, u, a)))
    return worst


@pytest.mark.parametrize("space", [lp_space(3, 2), L2, X2, half_line()])
def test_inverse_system_coherence(space):
    assert _coherence_deviation(space, np.random.default_rng(1), 300) < 1e-9


def test_projection_surjective_onto_ball():
    rng = np.random.default_rng(9)
    o = basepoint(L2)
    for _ in range(20):
        w = L2.point(*rng.uniform(-0.7, 0.7, 2))
        # any point beyond w on the ray from o projects back onto w when w is on the sphere,
        # and w itself is a preimage otherwise
        assert distance(L2, project(L2, o, 1.0, w), w) < 1e-6
        r = distance(L2, o, w)
        far = L2.point(*(np.array(w.coords) * (3.0 / r)))
        assert distance(L2, project(L2, o, r, far), w) < 1e-6


@given(space_and_points(2), st.floats(0.1, 20))
def test_projection_lands_in_ball(sp, t):
    space, o, a = sp
    assert distance(space, o, project(space, o, t, a)) <= t + 1e-9
