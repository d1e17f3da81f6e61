"""Coarse-map diagnostics on finite samples and the barycentric continuous
approximation of a vertex map from a simplicial complex into a Busemann space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .busemann import WeightedPoints, barycenter
from .complexes import BarycentricPoint, SimplicialComplex
from .errors import BusecoarseError, DomainError, PreconditionError
from .reports import CheckReport, to_jsonable
from .spaces import Point, SpaceDescriptor, distance, pairwise_distances, validate

__all__ = [
    "SampledMap",
    "sample_map",
    "CoarsenessProfile",
    "coarseness_profile",
    "ClosenessCertificate",
    "closeness",
    "Approximation",
    "continuous_approximation",
    "image_diameter_bound",
    "approximation_bound_check",
    "continuity_spot_check",
]

Metric = Callable[[Any, Any], float]


@dataclass(frozen=True)
class SampledMap:
    """A map known on finitely many domain points.

    ``domain_metric`` is needed only for the coarseness profile; it may be a
    space descriptor (whose distance is used) or any callable.
    """

    domain: tuple[Any, ...]
    values: tuple[Point, ...]
    target: SpaceDescriptor
    domain_metric: SpaceDescriptor | Metric | None = None

    def __post_init__(self):
        if len(self.domain) != len(self.values):
            raise PreconditionError(f"{len(self.domain)} domain points but {len(self.values)} values")
        object.__setattr__(self, "values", tuple(validate(self.target, v) for v in self.values))

    def __len__(self) -> int:
        return len(self.domain)

    def domain_distances(self) -> np.ndarray:
        m = self.domain_metric
        if m is None:
            raise PreconditionError("the map has no domain metric")
        if isinstance(m, SpaceDescriptor):
            return pairwise_distances(m, list(self.domain))
        n = len(self.domain)
        D = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                D[i, j] = D[j, i] = m(self.domain[i], self.domain[j])
        return D

    def value_distances(self) -> np.ndarray:
        return pairwise_distances(self.target, list(self.values))


def sample_map(
    domain_space: SpaceDescriptor, points: Sequence[Point], f: Callable[[Point], Point], target: SpaceDescriptor
) -> SampledMap:
    pts = tuple(validate(domain_space, a) for a in points)
    return SampledMap(pts, tuple(f(a) for a in pts), target, domain_space)


@dataclass
class CoarsenessProfile:
    """S(R) for each R, and the sampled properness verdict.

    ``preimage_bounds[R]`` is the radius of the smallest domain ball around the
    reference point that holds the preimage of the target ball B(f(y0), R).
    """

    rows: list[tuple[float, float]]
    proper: bool
    preimage_bounds: dict[float, float]
    extent: float
    witness: Any = None

    def to_json(self) -> dict:
        return {
            "rows": [{"R": R, "S": S} for R, S in self.rows],
            "proper": self.proper,
            "preimage_bounds": [{"R": R, "bound": b} for R, b in self.preimage_bounds.items()],
            "extent": self.extent,
            "witness": to_jsonable(self.witness),
        }


def coarseness_profile(f: SampledMap, radii: Sequence[float], *, reference: int = 0) -> CoarsenessProfile:
    """Sampled expansion S(R) = max d(f(y), f(y')) over pairs with d(y, y') < R.

    Properness is judged on the sample: the preimage of the smallest target
    ball around f(y0) must stay in the inner half of the sampled domain
    (measured from y0).  A preimage point in the outer half is returned as
    the witness of non-properness.
    """
    if len(f) == 0:
        raise PreconditionError("sample must be nonempty")
    radii = [float(R) for R in radii]
    if not radii or any(not R > 0 for R in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be positive and strictly increasing")
    Dd = f.domain_distances()
    Dv = f.value_distances()
    rows = []
    for R in radii:
        close = Dd < R
        rows.append((R, float(Dv[close].max()) if close.any() else 0.0))
    from_ref = Dd[reference]
    extent = float(from_ref.max())
    bounds = {}
    for R in radii:
        inside = Dv[reference] <= R
        bounds[R] = float(from_ref[inside].max())
    inside = Dv[reference] <= radii[0]
    far = np.flatnonzero(inside & (from_ref >= extent / 2.0)) if extent > 0 else np.array([], dtype=int)
    witness = None
    if far.size:
        j = int(far[np.argmax(from_ref[far])])
        witness = {"reference": f.domain[reference], "far_point": f.domain[j], "distance": float(from_ref[j])}
    return CoarsenessProfile(rows, far.size == 0, bounds, extent, witness)


@dataclass(frozen=True)
class ClosenessCertificate:
    C: float
    attained_at: int

    def to_json(self) -> dict:
        return {"C": self.C, "attained_at": self.attained_at}


def closeness(f: SampledMap, g: SampledMap) -> ClosenessCertificate:
    """C = max over the common sample of d(f(y), g(y))."""
    if len(f) != len(g) or any(a != b for a, b in zip(f.domain, g.domain)):
        raise PreconditionError("the two maps are sampled on different domains")
    if f.target != g.target:
        raise PreconditionError("the two maps have different targets")
    if len(f) == 0:
        raise PreconditionError("sample must be nonempty")
    gaps = [distance(f.target, a, b) for a, b in zip(f.values, g.values)]
    i = int(np.argmax(gaps))
    return ClosenessCertificate(float(gaps[i]), i)


# -- barycentric approximation ----------------------------------------------------


@dataclass
class Approximation:
    """g on the evaluated points, f extended by its dominant vertex, and per-point failures."""

    g: SampledMap
    f: SampledMap
    indices: list[int]
    errors: dict[int, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "evaluated": len(self.indices),
            "g": [v.to_json() for v in self.g.values],
            "errors": [{"index": i, "error": e} for i, e in sorted(self.errors.items())],
        }


def _vertex_image(vertex_map, v: int) -> Point:
    try:
        return vertex_map[v]
    except (KeyError, IndexError):
        raise PreconditionError(f"vertex map is undefined at vertex {v}") from None


def continuous_approximation(
    complexY: SimplicialComplex,
    vertex_map: Sequence[Point] | Mapping[int, Point],
    eval_points: Sequence[BarycentricPoint],
    target: SpaceDescriptor,
) -> Approximation:
    """g(y) = barycenter of {(f(v_i), t_i)} for y with barycentric coordinates {(v_i, t_i)}.

    f(y) is the image of the dominant vertex of y.  Points whose images can
    not be averaged (e.g. different blocks of X_p) are recorded in ``errors``
    and left out of both sampled maps.
    """
    for v in range(complexY.n_vertices):
        validate(target, _vertex_image(vertex_map, v))
    dom, gv, fv, idx, errors = [], [], [], [], {}
    for i, y in enumerate(eval_points):
        if not complexY.contains(y.simplex):
            raise PreconditionError(f"{y.simplex} is not a simplex of the complex")
        wp = WeightedPoints.from_pairs([_vertex_image(vertex_map, v) for v in y.simplex], y.weights)
        try:
            g = barycenter(target, wp)
        except BusecoarseError as exc:
            errors[i] = str(exc)
            continue
        dom.append(y)
        gv.append(g)
        fv.append(_vertex_image(vertex_map, y.dominant_vertex()))
        idx.append(i)
    return Approximation(
        SampledMap(tuple(dom), tuple(gv), target), SampledMap(tuple(dom), tuple(fv), target), idx, errors
    )


def image_diameter_bound(
    vertex_map: Sequence[Point] | Mapping[int, Point], simplices: Sequence[Sequence[int]], target: SpaceDescriptor
) -> float:
    """Largest image diameter over the given simplices."""
    C = 0.0
    for s in {tuple(sorted(s)) for s in simplices}:
        pts = [_vertex_image(vertex_map, v) for v in s]
        if len(pts) > 1:
            C = max(C, float(pairwise_distances(target, pts).max()))
    return C


def approximation_bound_check(
    complexY: SimplicialComplex,
    vertex_map: Sequence[Point] | Mapping[int, Point],
    eval_points: Sequence[BarycentricPoint],
    target: SpaceDescriptor,
    *,
    slack: float = 1e-6,
) -> CheckReport:
    """Check min_i d(g(y), f(v_i)) < C and d(g(y), f(y)) < 2C at every evaluated y.

    C is the largest image diameter over the simplices carrying the sample.
    The margin is the smaller of the two worst slacks.
    """
    approx = continuous_approximation(complexY, vertex_map, eval_points, target)
    C = image_diameter_bound(vertex_map, [y.simplex for y in eval_points], target)
    worst_near, worst_full, witness = -math.inf, -math.inf, None
    for k, i in enumerate(approx.indices):
        y, g, f = eval_points[i], approx.g.values[k], approx.f.values[k]
        near = min(distance(target, g, _vertex_image(vertex_map, v)) for v in y.simplex)
        full = distance(target, g, f)
        if near > worst_near:
            worst_near = near
        if full > worst_full:
            worst_full = full
            witness = {"y": y, "g": g, "f": f}
    margin = min(C + slack - worst_near, 2 * C + slack - worst_full)
    return CheckReport(
        "approximation_bound",
        bool(approx.indices) and margin > 0,
        float(margin),
        lhs=float(worst_full),
        rhs=2 * C,
        witness=witness,
        stats={
            "C": C,
            "max_nearest_vertex_distance": worst_near,
            "max_distance_to_f": worst_full,
            "evaluated": len(approx.indices),
            "unsupported": len(approx.errors),
        },
    )


def continuity_spot_check(
    complexY: SimplicialComplex,
    vertex_map: Sequence[Point] | Mapping[int, Point],
    y: BarycentricPoint,
    target: SpaceDescriptor,
    *,
    h: float = 1e-4,
) -> float:
    """Largest move of g when y is shifted by h towards each vertex of its simplex.

    Returns the ratio d(g(y), g(y')) / h maximised over the shifts; a bounded
    ratio as h shrinks is the sampled sign of continuity.
    """
    if not 0 < h < 1:
        raise DomainError(f"h must lie in (0, 1), got {h}")
    imgs = [_vertex_image(vertex_map, v) for v in y.simplex]
    g0 = barycenter(target, WeightedPoints.from_pairs(imgs, y.weights))
    worst = 0.0
    for k in range(len(y.simplex)):
        w = [(1 - h) * t + (h if j == k else 0.0) for j, t in enumerate(y.weights)]
        g1 = barycenter(target, WeightedPoints.normalized(imgs, w))
        worst = max(worst, distance(target, g0, g1) / h)
    return worst
