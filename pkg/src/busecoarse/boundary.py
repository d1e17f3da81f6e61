"""Visual-boundary machinery: radial projections onto balls, the inverse
system they form, ideal points, and the contraction of the compactification.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, InvalidPointError, PreconditionError
from .reports import CheckReport
from .spaces import (
    BLOCK,
    GLUED,
    HALFLINE,
    LP,
    RAY,
    Point,
    SpaceDescriptor,
    basepoint,
    default_tolerance,
    delta,
    distance,
    geodesic_point,
    lp_norm,
    validate,
)

__all__ = [
    "BoundaryPoint",
    "CompactifiedPoint",
    "ray_end",
    "sphere_direction",
    "validate_boundary",
    "ray_point",
    "project",
    "project_between",
    "contraction",
    "contraction_radius",
    "busemann_contraction_bound",
    "in_ray_end_neighborhood",
    "compactified_from_json",
]

RAY_END = "ray_end"
SPHERE = "sphere"


@dataclass(frozen=True)
class BoundaryPoint:
    """An ideal point: the end of the half-line, or a unit direction in block ``n``."""

    tag: str
    n: int = 0
    direction: tuple[float, ...] = ()

    def renormalize(self, p: float) -> "BoundaryPoint":
        if self.tag == RAY_END:
            return self
        return sphere_direction(self.n, self.direction, p)

    def to_json(self) -> dict:
        if self.tag == RAY_END:
            return {"tag": RAY_END}
        return {"tag": SPHERE, "n": self.n, "dir": [float(c) for c in self.direction]}

    def __repr__(self) -> str:
        if self.tag == RAY_END:
            return "ray_end"
        return f"sphere{self.n}({', '.join(f'{c:g}' for c in self.direction)})"


CompactifiedPoint = Union[Point, BoundaryPoint]


def ray_end() -> BoundaryPoint:
    return BoundaryPoint(RAY_END)


def sphere_direction(n: int, direction, p: float) -> BoundaryPoint:
    """Boundary point of block ``n`` in the direction of ``direction`` (normalised in l_p)."""
    direction = tuple(float(c) for c in direction)
    if len(direction) != n or n < 1:
        raise InvalidPointError(f"direction for block {n} needs {n} coordinates")
    norm = lp_norm(direction, p)
    if not (norm > 0 and math.isfinite(norm)):
        raise InvalidPointError("boundary direction must be a finite nonzero vector")
    if abs(norm - 1.0) <= 1e-15:
        return BoundaryPoint(SPHERE, n=n, direction=direction)
    return BoundaryPoint(SPHERE, n=n, direction=tuple(c / norm for c in direction))


def validate_boundary(space: SpaceDescriptor, xi: BoundaryPoint) -> BoundaryPoint:
    if xi.tag == RAY_END:
        if space.kind == LP:
            raise InvalidPointError(f"{space} has no ray end; use a sphere direction")
        return xi
    if xi.tag != SPHERE:
        raise InvalidPointError(f"unknown boundary tag {xi.tag!r}")
    if space.kind == HALFLINE:
        raise InvalidPointError("the half-line's only ideal point is the ray end")
    if space.kind == LP and xi.n != space.dim:
        raise InvalidPointError(f"{space} boundary directions have {space.dim} coordinates")
    norm = lp_norm(xi.direction, space.p)
    if len(xi.direction) != xi.n or abs(norm - 1.0) > 1e-12:
        raise InvalidPointError(f"boundary direction must have unit l_p norm, got {norm}")
    return xi


def ray_point(space: SpaceDescriptor, o: Point, xi: BoundaryPoint, t: float) -> Point:
    """The point at distance ``t`` from ``o`` on the geodesic ray from ``o`` towards ``xi``."""
    o = validate(space, o)
    xi = validate_boundary(space, xi)
    if t < 0:
        raise DomainError(f"ray parameter must be >= 0, got {t}")
    if space.kind == LP:
        return validate(space, Point(BLOCK, n=o.n, coords=tuple(c + t * u for c, u in zip(o.coords, xi.direction))))
    if xi.tag == RAY_END:
        if o.tag == RAY:
            return Point(RAY, t=o.t + t)
        # leave the block through its gluing point, then run up the half-line
        to_gate = lp_norm(o.coords, space.p)
        if t <= to_gate:
            return geodesic_point(space, o, Point(RAY, t=float(o.n)), t / to_gate)
        return Point(RAY, t=o.n + (t - to_gate))
    if o.tag == BLOCK and o.n == xi.n:
        return validate(space, Point(BLOCK, n=o.n, coords=tuple(c + t * u for c, u in zip(o.coords, xi.direction))))
    gate = Point(RAY, t=float(xi.n))
    to_gate = distance(space, o, gate)
    if t <= to_gate:
        return geodesic_point(space, o, gate, t / to_gate) if to_gate > 0 else gate
    s = t - to_gate
    return validate(space, Point(BLOCK, n=xi.n, coords=tuple(s * u for u in xi.direction)))


def _radial(space: SpaceDescriptor, o: Point, radius: float, a: Point) -> Point:
    r = distance(space, o, a)
    if r <= radius:
        return a
    return delta(space, o, a, radius / r)


def project(space: SpaceDescriptor, o: Point | None, t: float, z: CompactifiedPoint) -> Point:
    """Radial projection of ``X`` (and its ideal points) onto the closed ball B(o, t)."""
    t = float(t)
    if not t > 0:
        raise DomainError(f"projection radius must be positive, got {t}")
    o = basepoint(space) if o is None else validate(space, o)
    if isinstance(z, BoundaryPoint):
        return ray_point(space, o, z, t)
    return _radial(space, o, t, validate(space, z))


def project_between(space: SpaceDescriptor, o: Point | None, s: float, t: float, a: Point, *, tol: float | None = None) -> Point:
    """Bonding map B(o, t) -> B(o, s) of the inverse system, for 0 < s < t."""
    s, t = float(s), float(t)
    if not (0 < s < t):
        raise DomainError(f"need 0 < s < t, got s={s}, t={t}")
    tol = default_tolerance() if tol is None else tol
    o = basepoint(space) if o is None else validate(space, o)
    a = validate(space, a)
    if distance(space, o, a) > t + tol:
        raise PreconditionError(f"point {a!r} lies outside B(o, {t})")
    return _radial(space, o, s, a)


def contraction_radius(s: float) -> float:
    """Clock of the contraction: T(s) = (1 - s) / s, infinite at s = 0."""
    if s == 0:
        return math.inf
    return (1.0 - s) / s


def contraction(space: SpaceDescriptor, o: Point | None, z: CompactifiedPoint, s: float) -> CompactifiedPoint:
    """Contraction of X together with its visual boundary onto ``o``.

    s = 0 leaves every point (ideal ones included) fixed; for s in (0, 1] the
    point is projected onto B(o, T(s)); s = 1 sends everything to ``o``.
    """
    s = float(s)
    if not (0.0 <= s <= 1.0):
        raise DomainError(f"contraction parameter must lie in [0, 1], got {s}")
    o = basepoint(space) if o is None else validate(space, o)
    if s == 0.0:
        return validate_boundary(space, z) if isinstance(z, BoundaryPoint) else validate(space, z)
    if s == 1.0:
        return o
    return project(space, o, contraction_radius(s), z)


def busemann_contraction_bound(
    space: SpaceDescriptor, o: Point | None, a: Point, b: Point, t: float, *, tol: float | None = None
) -> CheckReport:
    """Check d(delta_{t/r}(a), delta_{t/r}(b)) <= (t/r) d(a, b) with r = min(d(o,a), d(o,b))."""
    tol = default_tolerance() if tol is None else tol
    o = basepoint(space) if o is None else validate(space, o)
    r = min(distance(space, o, a), distance(space, o, b))
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if r < t:
        raise PreconditionError(f"min(d(o,a), d(o,b)) = {r} is below t = {t}")
    scale = t / r
    a2, b2 = delta(space, o, a, scale), delta(space, o, b, scale)
    lhs = distance(space, a2, b2)
    rhs = scale * distance(space, a, b)
    margin = rhs - lhs
    return CheckReport(
        "busemann_contraction_bound",
        margin >= -tol,
        margin,
        lhs=lhs,
        rhs=rhs,
        witness={"a_scaled": a2, "b_scaled": b2, "r": r},
    )


def in_ray_end_neighborhood(space: SpaceDescriptor, z: CompactifiedPoint, N: int) -> bool:
    """Membership in the N-th basic neighbourhood of the ray end of X_p.

    The neighbourhood holds the ray end itself, ray points beyond N, every
    point of blocks n > N, and the sphere directions of those blocks.
    """
    if space.kind not in (GLUED, HALFLINE):
        raise InvalidPointError(f"{space} has no ray end")
    if isinstance(z, BoundaryPoint):
        return z.tag == RAY_END or z.n > N
    z = validate(space, z)
    if z.tag == RAY:
        return z.t > N
    return z.n > N


def compactified_from_json(space: SpaceDescriptor, obj) -> CompactifiedPoint:
    from .spaces import point_from_json

    if isinstance(obj, dict) and obj.get("tag") == RAY_END:
        return validate_boundary(space, ray_end())
    if isinstance(obj, dict) and obj.get("tag") == SPHERE:
        direction = obj.get("dir", obj.get("direction"))
        n = obj.get("n", len(direction))
        return validate_boundary(space, sphere_direction(n, direction, space.p))
    return point_from_json(space, obj)
