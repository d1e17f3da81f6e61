"""Seeded samplers and lexicographic grids over the catalogue spaces."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .boundary import BoundaryPoint, ray_end, ray_point, sphere_direction
from .errors import PreconditionError
from .spaces import (
    BLOCK,
    GLUED,
    HALFLINE,
    LP,
    RAY,
    Point,
    SpaceDescriptor,
    basepoint,
    lp_norm,
    validate,
)

__all__ = [
    "random_direction",
    "random_point",
    "sphere_sample",
    "ball_sample",
    "perturb",
    "ball_grid",
    "halfline_window",
    "lp_ball_window",
]

MAX_GRID_POINTS = 400_000


def _unit_vector(dim: int, p: float, rng: np.random.Generator) -> tuple[float, ...]:
    while True:
        v = rng.standard_normal(dim)
        if np.any(v):
            break
    return tuple(float(c) for c in v / lp_norm(v, p))


def random_direction(space: SpaceDescriptor, rng: np.random.Generator, max_block: int = 6) -> BoundaryPoint:
    """A random ideal point; in X_p the ray end and blocks 1..max_block are equally likely."""
    if space.kind == HALFLINE:
        return ray_end()
    if space.kind == LP:
        return sphere_direction(space.dim, _unit_vector(space.dim, space.p, rng), space.p)
    n = int(rng.integers(0, max_block + 1))
    if n == 0:
        return ray_end()
    return sphere_direction(n, _unit_vector(n, space.p, rng), space.p)


def random_point(space: SpaceDescriptor, rng: np.random.Generator, scale: float = 5.0, max_block: int = 4) -> Point:
    """A point for property sweeps: uniform coordinates in [-scale, scale]."""
    if space.kind == LP:
        return space.point(*rng.uniform(-scale, scale, space.dim))
    if space.kind == HALFLINE:
        return space.ray(rng.uniform(0.0, scale))
    n = int(rng.integers(0, max_block + 1))
    if n == 0:
        return space.ray(rng.uniform(0.0, scale + max_block))
    return space.block(n, rng.uniform(-scale, scale, n))


def sphere_sample(space: SpaceDescriptor, o: Point, r: float, rng: np.random.Generator, max_block: int = 6) -> Point:
    """A point at distance exactly ``r`` from ``o`` along a random geodesic ray."""
    return ray_point(space, o, random_direction(space, rng, max_block), r)


def ball_sample(
    space: SpaceDescriptor, o: Point, radius: float, count: int, rng: np.random.Generator, max_block: int = 6
) -> list[Point]:
    """``count`` points of B(o, radius) with radius uniform along random rays."""
    radii = rng.uniform(0.0, radius, count)
    return [sphere_sample(space, o, float(r), rng, max_block) for r in radii]


def perturb(space: SpaceDescriptor, a: Point, rho: float, rng: np.random.Generator, max_block: int = 6) -> Point:
    """A point at distance ``rho`` from ``a`` (exactly, unless clamped at the end of the half-line)."""
    a = validate(space, a)
    if space.kind == HALFLINE or (space.kind == GLUED and a.tag == RAY and rng.random() < 0.25):
        if rng.random() < 0.5 and a.t >= rho:
            return Point(RAY, t=a.t - rho)
        return Point(RAY, t=a.t + rho)
    return ray_point(space, a, random_direction(space, rng, max_block), rho)


# -- grids ------------------------------------------------------------------------


def _offsets(dim: int, p: float, radius: float, h: float) -> list[tuple[float, ...]]:
    """Integer multiples of ``h`` in the closed l_p ball of the given radius."""
    if radius < 0:
        return []
    k = int(math.floor(radius / h + 1e-12))
    count = (2 * k + 1) ** dim
    if count > MAX_GRID_POINTS:
        raise PreconditionError(f"grid of {count} points exceeds the limit of {MAX_GRID_POINTS}")
    steps = np.arange(-k, k + 1) * h
    if dim == 1:
        return [(float(s),) for s in steps]
    out = []
    limit = radius * (1 + 1e-12)
    for combo in itertools.product(steps, repeat=dim):
        if lp_norm(combo, p) <= limit:
            out.append(tuple(float(c) for c in combo))
    return out


def _sort_key(a: Point):
    if a.tag == RAY:
        return (0, 0, (a.t,))
    return (1, a.n, a.coords)


def ball_grid(space: SpaceDescriptor, x: Point, R: float, h: float) -> list[Point]:
    """Grid points of spacing ``h`` inside the closed ball B(x, R), sorted lexicographically.

    Grids are anchored at ``x`` in its own chart and at the gluing points in
    the other blocks of X_p.
    """
    if not (R >= 0 and h > 0):
        raise PreconditionError("need R >= 0 and h > 0")
    x = validate(space, x)
    pts: set[Point] = set()
    if space.kind == LP:
        for off in _offsets(space.dim, space.p, R, h):
            pts.add(validate(space, Point(BLOCK, n=space.dim, coords=tuple(c + o for c, o in zip(x.coords, off)))))
        return sorted(pts, key=_sort_key)
    if space.kind == HALFLINE:
        for (off,) in _offsets(1, 1.0, R, h):
            if x.t + off >= 0:
                pts.add(Point(RAY, t=x.t + off))
        return sorted(pts, key=_sort_key)
    home_block = x.n if x.tag == BLOCK else None
    if x.tag == BLOCK:
        for off in _offsets(x.n, space.p, R, h):
            pts.add(validate(space, Point(BLOCK, n=x.n, coords=tuple(c + o for c, o in zip(x.coords, off)))))
        gate, rho = float(x.n), R - lp_norm(x.coords, space.p)
    else:
        gate, rho = x.t, R
    if rho >= 0:
        for (off,) in _offsets(1, 1.0, rho, h):
            if gate + off >= 0:
                pts.add(Point(RAY, t=gate + off))
        for n in range(max(1, math.ceil(gate - rho)), math.floor(gate + rho) + 1):
            left = rho - abs(n - gate)
            if n == home_block or left <= 0:
                continue
            pts.add(Point(RAY, t=float(n)))
            for off in _offsets(n, space.p, left, h):
                pts.add(validate(space, Point(BLOCK, n=n, coords=off)))
    if len(pts) > MAX_GRID_POINTS:
        raise PreconditionError(f"grid of {len(pts)} points exceeds the limit of {MAX_GRID_POINTS}")
    return sorted(pts, key=_sort_key)


def halfline_window(start: float, stop: float, step: float) -> list[Point]:
    """Equally spaced ray points start, start + step, ..., up to stop (inclusive)."""
    if start < 0 or stop < start or step <= 0:
        raise PreconditionError("need 0 <= start <= stop and step > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [Point(RAY, t=start + i * step) for i in range(count)]


def lp_ball_window(space: SpaceDescriptor, radius: float, step: float) -> list[Point]:
    return ball_grid(space, basepoint(space), radius, step)
