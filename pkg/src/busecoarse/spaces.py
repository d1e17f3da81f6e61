"""Catalogue of proper metric spaces: finite-dimensional l_p, the half-line,
and the glued space X_p (a half-line with a copy of l_p(n) attached at the
integer n for every n >= 1, carrying the path metric).

Points are immutable :class:`Point` records.  A point of ``l_p(n)`` is a
``block`` point with ``n == dim``; a point of the half-line is a ``ray``
point.  In X_p both tags occur, and the zero vector of block ``n`` *is* the
ray point ``n``; constructors always return that canonical ray form.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InvalidPointError, InvalidSpaceError

__all__ = [
    "LP",
    "HALFLINE",
    "GLUED",
    "SpaceDescriptor",
    "Point",
    "lp_space",
    "raw_lp_space",
    "half_line",
    "glued_xp",
    "default_tolerance",
    "lp_norm",
    "validate",
    "basepoint",
    "distance",
    "geodesic_point",
    "delta",
    "norm_from_basepoint",
    "pairwise_distances",
    "distances_from",
    "parse_space",
    "space_from_json",
    "point_from_json",
]

LP = "lp"
HALFLINE = "halfline"
GLUED = "glued_xp"

RAY = "ray"
BLOCK = "block"

_DEFAULT_TOL = 1e-9


def default_tolerance() -> float:
    """Default numerical tolerance; ``BUSECOARSE_TOLERANCE`` overrides 1e-9."""
    raw = os.environ.get("BUSECOARSE_TOLERANCE")
    if raw is None or raw.strip() == "":
        return _DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError as exc:
        raise DomainError(f"BUSECOARSE_TOLERANCE is not a number: {raw!r}") from exc
    if not value > 0 or not math.isfinite(value):
        raise DomainError(f"BUSECOARSE_TOLERANCE must be positive, got {raw!r}")
    return value


@dataclass(frozen=True)
class SpaceDescriptor:
    """Which space of the catalogue is in play.

    ``raw`` marks an l_p space built through :func:`raw_lp_space`; such spaces
    may use p = 1 or p = inf and are refused by Busemann-only operations.
    """

    kind: str
    p: float | None = None
    dim: int | None = None
    raw: bool = False

    @property
    def is_busemann(self) -> bool:
        if self.kind == HALFLINE:
            return True
        return self.p is not None and 1.0 < self.p < math.inf

    def ray(self, t: float) -> "Point":
        return validate(self, Point(RAY, t=float(t)))

    def block(self, n: int, coords: Iterable[float]) -> "Point":
        return validate(self, Point(BLOCK, n=int(n), coords=tuple(float(c) for c in coords)))

    def point(self, *coords: float) -> "Point":
        """Point of an l_p space from its coordinates (or of the half-line from t)."""
        if self.kind == HALFLINE:
            if len(coords) != 1:
                raise InvalidPointError("half-line points take a single coordinate")
            return self.ray(coords[0])
        if self.kind == LP:
            if len(coords) == 1 and isinstance(coords[0], (list, tuple, np.ndarray)):
                coords = tuple(coords[0])
            return self.block(self.dim, coords)
        raise InvalidPointError("use .ray() or .block() for points of X_p")

    def to_json(self) -> dict:
        if self.kind == HALFLINE:
            return {"kind": HALFLINE}
        if self.kind == GLUED:
            return {"kind": GLUED, "p": _json_float(self.p)}
        out = {"kind": LP, "p": _json_float(self.p), "dim": self.dim}
        if self.raw:
            out["raw"] = True
        return out

    def __str__(self) -> str:
        if self.kind == HALFLINE:
            return "halfline"
        if self.kind == GLUED:
            return f"X_{self.p:g}"
        prefix = "raw " if self.raw else ""
        return f"{prefix}l_{self.p:g}({self.dim})"


def _json_float(x: float | None):
    if x is None:
        return None
    return "inf" if x == math.inf else float(x)


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 1:
        raise InvalidSpaceError(f"dimension must be a positive integer, got {dim!r}")
    return int(dim)


def lp_space(p: float, dim: int) -> SpaceDescriptor:
    """The Busemann space l_p(dim); requires 1 < p < inf."""
    p = float(p)
    if not (1.0 < p < math.inf):
        raise InvalidSpaceError(
            f"l_p is Busemann only for 1 < p < inf (got p={p}); use raw_lp_space for negative tests"
        )
    return SpaceDescriptor(LP, p=p, dim=_check_dim(dim))


def raw_lp_space(p: float, dim: int) -> SpaceDescriptor:
    """l_p(dim) as a plain normed space; p = 1 and p = inf are accepted."""
    p = float(p)
    if not p >= 1.0:
        raise InvalidSpaceError(f"l_p needs p >= 1, got {p}")
    return SpaceDescriptor(LP, p=p, dim=_check_dim(dim), raw=True)


def half_line() -> SpaceDescriptor:
    return SpaceDescriptor(HALFLINE)


def glued_xp(p: float) -> SpaceDescriptor:
    """The glued space X_p; requires 1 < p < inf."""
    p = float(p)
    if not (1.0 < p < math.inf):
        raise InvalidSpaceError(f"X_p needs 1 < p < inf, got p={p}")
    return SpaceDescriptor(GLUED, p=p)


@dataclass(frozen=True)
class Point:
    """A point of a catalogue space.

    ``tag == "ray"`` uses ``t`` (position on the half-line); ``tag == "block"``
    uses ``n`` (block index, equal to the dimension) and ``coords``.
    """

    tag: str
    t: float = 0.0
    n: int = 0
    coords: tuple[float, ...] = field(default_factory=tuple)

    @property
    def array(self) -> np.ndarray:
        if self.tag == RAY:
            return np.array([self.t])
        return np.asarray(self.coords, dtype=float)

    def to_json(self) -> dict:
        if self.tag == RAY:
            return {"tag": RAY, "t": float(self.t)}
        return {"tag": BLOCK, "n": int(self.n), "coords": [float(c) for c in self.coords]}

    def __repr__(self) -> str:
        if self.tag == RAY:
            return f"ray({self.t:g})"
        return f"block{self.n}({', '.join(f'{c:g}' for c in self.coords)})"


def validate(space: SpaceDescriptor, a: Point) -> Point:
    """Check that ``a`` lives in ``space`` and return its canonical form."""
    if not isinstance(a, Point):
        raise InvalidPointError(f"expected a Point, got {type(a).__name__}")
    if a.tag == RAY:
        if space.kind == LP:
            raise InvalidPointError(f"{space} has no ray points")
        if not (math.isfinite(a.t) and a.t >= 0.0):
            raise InvalidPointError(f"ray coordinate must be finite and >= 0, got {a.t}")
        return a
    if a.tag != BLOCK:
        raise InvalidPointError(f"unknown point tag {a.tag!r}")
    if space.kind == HALFLINE:
        raise InvalidPointError("the half-line has no block points")
    if len(a.coords) != a.n:
        raise InvalidPointError(f"block {a.n} point needs {a.n} coordinates, got {len(a.coords)}")
    if space.kind == LP and a.n != space.dim:
        raise InvalidPointError(f"{space} points need {space.dim} coordinates, got {a.n}")
    if a.n < 1:
        raise InvalidPointError("block index must be >= 1")
    if not all(math.isfinite(c) for c in a.coords):
        raise InvalidPointError("coordinates must be finite")
    if space.kind == GLUED and not any(a.coords):
        return Point(RAY, t=float(a.n))
    return a


def basepoint(space: SpaceDescriptor) -> Point:
    """Canonical basepoint: the origin of l_p, ray point 0 otherwise."""
    if space.kind == LP:
        return Point(BLOCK, n=space.dim, coords=(0.0,) * space.dim)
    return Point(RAY, t=0.0)


def lp_norm(v: Sequence[float], p: float) -> float:
    """The l_p norm of a finite vector, computed with overflow-safe scaling."""
    if p == 2.0:
        return math.hypot(*v)
    if p == 1.0:
        return math.fsum(abs(x) for x in v)
    m = max((abs(x) for x in v), default=0.0)
    if m == 0.0 or p == math.inf:
        return m
    return m * math.fsum((abs(x) / m) ** p for x in v) ** (1.0 / p)


def _block_norm(space: SpaceDescriptor, a: Point) -> float:
    return 0.0 if a.tag == RAY else lp_norm(a.coords, space.p)


def distance(space: SpaceDescriptor, a: Point, b: Point) -> float:
    """Path-metric distance between two points of ``space``."""
    a = validate(space, a)
    b = validate(space, b)
    return _distance(space, a, b)


def _distance(space: SpaceDescriptor, a: Point, b: Point) -> float:
    if space.kind == LP:
        return lp_norm([x - y for x, y in zip(a.coords, b.coords)], space.p)
    if a.tag == RAY and b.tag == RAY:
        return abs(a.t - b.t)
    if a.tag == RAY:
        a, b = b, a
    if b.tag == RAY:
        return lp_norm(a.coords, space.p) + abs(a.n - b.t)
    if a.n == b.n:
        return lp_norm([x - y for x, y in zip(a.coords, b.coords)], space.p)
    # summing the two norms first keeps d(a, b) == d(b, a) bit for bit
    return (lp_norm(a.coords, space.p) + lp_norm(b.coords, space.p)) + abs(a.n - b.n)


def norm_from_basepoint(space: SpaceDescriptor, a: Point) -> float:
    return distance(space, basepoint(space), a)


def _legs(space: SpaceDescriptor, a: Point, b: Point) -> list[tuple[Point, Point]]:
    """Split the geodesic a -> b of X_p into single-chart segments."""
    if a.tag == RAY and b.tag == RAY:
        return [(a, b)]
    if a.tag == BLOCK and b.tag == BLOCK and a.n == b.n:
        return [(a, b)]
    waypoints = [a]
    if a.tag == BLOCK:
        waypoints.append(Point(RAY, t=float(a.n)))
    if b.tag == BLOCK:
        waypoints.append(Point(RAY, t=float(b.n)))
    waypoints.append(b)
    legs = []
    for u, v in zip(waypoints, waypoints[1:]):
        if u != v:
            legs.append((u, v))
    return legs or [(a, b)]


def _interpolate_in_chart(u: Point, v: Point, s: float) -> Point:
    """Affine interpolation inside one chart (one block, or the ray)."""
    if u.tag == RAY and v.tag == RAY:
        return Point(RAY, t=(1.0 - s) * u.t + s * v.t)
    n = u.n if u.tag == BLOCK else v.n
    cu = u.coords if u.tag == BLOCK else (0.0,) * n
    cv = v.coords if v.tag == BLOCK else (0.0,) * n
    coords = tuple((1.0 - s) * x + s * y for x, y in zip(cu, cv))
    if not any(coords):
        return Point(RAY, t=float(n))
    return Point(BLOCK, n=n, coords=coords)


def geodesic_point(space: SpaceDescriptor, a: Point, b: Point, t: float) -> Point:
    """Point at fraction ``t`` of the way along the geodesic from ``a`` to ``b``.

    In l_p (and in raw l_p spaces) this is the affine geodesic ``(1-t)a + tb``.
    In X_p it is the arc-length parametrisation of the path through the
    gluing points.  ``t = 0`` and ``t = 1`` return the endpoints exactly.
    """
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"geodesic parameter must lie in [0, 1], got {t}")
    a = validate(space, a)
    b = validate(space, b)
    if t == 0.0 or a == b:
        return a
    if t == 1.0:
        return b
    if space.kind == LP:
        return Point(
            BLOCK, n=a.n, coords=tuple((1.0 - t) * x + t * y for x, y in zip(a.coords, b.coords))
        )
    if space.kind == HALFLINE:
        return Point(RAY, t=(1.0 - t) * a.t + t * b.t)
    legs = _legs(space, a, b)
    lengths = [_distance(space, u, v) for u, v in legs]
    remaining = t * math.fsum(lengths)
    for (u, v), length in zip(legs, lengths):
        if remaining < length:
            return _interpolate_in_chart(u, v, remaining / length)
        remaining -= length
    return b


def delta(space: SpaceDescriptor, o: Point, x: Point, t: float) -> Point:
    """Radial contraction towards ``o``: the point of [o, x] at distance t*d(o, x) from o."""
    return geodesic_point(space, o, x, t)


# -- vectorised distances -------------------------------------------------------


def _encode(space: SpaceDescriptor, points: Sequence[Point]):
    pts = [validate(space, a) for a in points]
    if space.kind == LP:
        return np.array([a.coords for a in pts], dtype=float).reshape(len(pts), space.dim)
    if space.kind == HALFLINE:
        return np.array([a.t for a in pts], dtype=float)
    width = max((a.n for a in pts if a.tag == BLOCK), default=1)
    coords = np.zeros((len(pts), width))
    pos = np.empty(len(pts))
    blk = np.zeros(len(pts), dtype=int)
    for i, a in enumerate(pts):
        if a.tag == RAY:
            pos[i] = a.t
        else:
            pos[i] = a.n
            blk[i] = a.n
            coords[i, : a.n] = a.coords
    return pos, blk, coords


def _lp_rows(diff: np.ndarray, p: float) -> np.ndarray:
    if p == 2.0:
        return np.sqrt(np.sum(diff * diff, axis=-1))
    absd = np.abs(diff)
    if p == 1.0:
        return absd.sum(axis=-1)
    m = absd.max(axis=-1)
    if p == math.inf:
        return m
    safe = np.where(m > 0, m, 1.0)
    return m * np.sum((absd / safe[..., None]) ** p, axis=-1) ** (1.0 / p)


def pairwise_distances(
    space: SpaceDescriptor, points_a: Sequence[Point], points_b: Sequence[Point] | None = None
) -> np.ndarray:
    """Matrix of distances ``D[i, j] = d(points_a[i], points_b[j])``."""
    if points_b is None:
        points_b = points_a
    if len(points_a) == 0 or len(points_b) == 0:
        return np.zeros((len(points_a), len(points_b)))
    if space.kind == LP:
        xa, xb = _encode(space, points_a), _encode(space, points_b)
        return _lp_rows(xa[:, None, :] - xb[None, :, :], space.p)
    if space.kind == HALFLINE:
        ta, tb = _encode(space, points_a), _encode(space, points_b)
        return np.abs(ta[:, None] - tb[None, :])
    pa, ba, ca = _encode(space, points_a)
    pb, bb, cb = _encode(space, points_b)
    width = max(ca.shape[1], cb.shape[1])
    ca = np.pad(ca, ((0, 0), (0, width - ca.shape[1])))
    cb = np.pad(cb, ((0, 0), (0, width - cb.shape[1])))
    na, nb = _lp_rows(ca, space.p), _lp_rows(cb, space.p)
    through_ray = (na[:, None] + nb[None, :]) + np.abs(pa[:, None] - pb[None, :])
    same = (ba[:, None] == bb[None, :]) & (ba[:, None] > 0)
    if not same.any():
        return through_ray
    inside = np.zeros_like(through_ray)
    ii, jj = np.nonzero(same)
    inside[ii, jj] = _lp_rows(ca[ii] - cb[jj], space.p)
    return np.where(same, inside, through_ray)


def distances_from(space: SpaceDescriptor, x: Point, points: Sequence[Point]) -> np.ndarray:
    return pairwise_distances(space, [x], points)[0]


# -- parsing ----------------------------------------------------------------------


def _parse_p(raw) -> float:
    if isinstance(raw, str) and raw.strip().lower() in {"inf", "infinity"}:
        return math.inf
    return float(raw)


def space_from_json(obj: dict) -> SpaceDescriptor:
    """Build a space from ``{"kind": "lp", "p": 2.0, "dim": 3}`` and friends."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidSpaceError(f"space must be an object with a 'kind', got {obj!r}")
    kind = obj["kind"]
    if kind == HALFLINE:
        return half_line()
    if kind == GLUED:
        return glued_xp(_parse_p(obj.get("p", 2.0)))
    if kind in (LP, "raw_lp"):
        if "p" not in obj or "dim" not in obj:
            raise InvalidSpaceError("lp spaces need 'p' and 'dim'")
        p = _parse_p(obj["p"])
        if kind == "raw_lp" or obj.get("raw", False):
            return raw_lp_space(p, obj["dim"])
        return lp_space(p, obj["dim"])
    raise InvalidSpaceError(f"unknown space kind {kind!r}")


def parse_space(text: str) -> SpaceDescriptor:
    """Parse the compact CLI form: ``lp:P:DIM``, ``raw-lp:P:DIM``, ``halfline``, ``glued:P``."""
    parts = text.strip().split(":")
    head = parts[0].lower()
    try:
        if head == "halfline" and len(parts) == 1:
            return half_line()
        if head in ("glued", "glued_xp", "xp") and len(parts) == 2:
            return glued_xp(_parse_p(parts[1]))
        if head == "lp" and len(parts) == 3:
            return lp_space(_parse_p(parts[1]), int(parts[2]))
        if head in ("raw-lp", "raw_lp", "rawlp") and len(parts) == 3:
            return raw_lp_space(_parse_p(parts[1]), int(parts[2]))
    except ValueError as exc:
        if isinstance(exc, InvalidSpaceError):
            raise
        raise InvalidSpaceError(f"cannot parse space {text!r}: {exc}") from exc
    raise InvalidSpaceError(
        f"cannot parse space {text!r}; expected lp:P:DIM, raw-lp:P:DIM, halfline or glued:P"
    )


def point_from_json(space: SpaceDescriptor, obj) -> Point:
    """Parse a point; bare coordinate lists are accepted for l_p and numbers for the half-line."""
    if isinstance(obj, (int, float)):
        return space.ray(obj) if space.kind != LP else space.point(obj)
    if isinstance(obj, list):
        if space.kind == LP:
            return space.point(*obj)
        if space.kind == HALFLINE and len(obj) == 1:
            return space.ray(obj[0])
        raise InvalidPointError(f"bare coordinate list is ambiguous in {space}")
    if not isinstance(obj, dict) or "tag" not in obj:
        raise InvalidPointError(f"point must be an object with a 'tag', got {obj!r}")
    if obj["tag"] == RAY:
        return space.ray(obj.get("t", 0.0))
    if obj["tag"] == BLOCK:
        coords = obj.get("coords", [])
        return space.block(obj.get("n", len(coords)), coords)
    raise InvalidPointError(f"unknown point tag {obj['tag']!r}")
