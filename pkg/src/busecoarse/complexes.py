"""Finite windows of locally finite simplicial complexes: nerves of ball
covers, the spherical path metric, anti-Cech ladders of covers with their
coarsening maps, partition-of-unity maps into nerves, and contiguity.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import CoverageError, DomainError, InvariantViolation, PreconditionError, UnreachableError
from .nets import greedy_indices
from .spaces import (
    Point,
    SpaceDescriptor,
    default_tolerance,
    geodesic_point,
    pairwise_distances,
    point_from_json,
    space_from_json,
    validate,
)

__all__ = [
    "SimplicialComplex",
    "BarycentricPoint",
    "Cover",
    "nerve",
    "nerve_with_witnesses",
    "spherical_distance",
    "AntiCechLevel",
    "AntiCechSystem",
    "anti_cech",
    "nerve_map",
    "is_contiguous",
    "contiguity_search",
]

Simplex = frozenset


@dataclass(frozen=True)
class SimplicialComplex:
    """A finite simplicial complex stored by its facets (maximal simplices).

    Vertices are the indices ``0..len(vertices)-1``; ``vertices`` holds their
    labels.  Every face of a facet is a simplex, so closure under faces holds
    by construction.
    """

    vertices: tuple[Hashable, ...]
    facets: tuple[Simplex, ...]

    @classmethod
    def from_simplices(
        cls, vertices: Sequence[Hashable] | int, simplices: Iterable[Iterable[int]], max_dim: int | None = None
    ) -> "SimplicialComplex":
        labels = tuple(range(vertices)) if isinstance(vertices, int) else tuple(vertices)
        n = len(labels)
        cands: set[Simplex] = {frozenset([i]) for i in range(n)}
        for s in simplices:
            s = frozenset(int(v) for v in s)
            if not s:
                continue
            if min(s) < 0 or max(s) >= n:
                raise PreconditionError(f"simplex {sorted(s)} uses an unknown vertex")
            if max_dim is not None and len(s) > max_dim + 1:
                cands.update(frozenset(c) for c in itertools.combinations(sorted(s), max_dim + 1))
            else:
                cands.add(s)
        return cls(labels, _maximal(cands))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def max_dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    def contains(self, simplex: Iterable[int]) -> bool:
        s = frozenset(simplex)
        return bool(s) and any(s <= f for f in self._facets_of(min(s)))

    def _facets_of(self, v: int) -> list[Simplex]:
        index = self.__dict__.get("_index")
        if index is None:
            index = {}
            for f in self.facets:
                for u in f:
                    index.setdefault(u, []).append(f)
            object.__setattr__(self, "_index", index)
        return index.get(v, [])

    def simplices(self) -> list[tuple[int, ...]]:
        """All simplices, sorted by dimension then lexicographically."""
        out: set[tuple[int, ...]] = set()
        for f in self.facets:
            fs = sorted(f)
            for k in range(1, len(fs) + 1):
                out.update(itertools.combinations(fs, k))
        return sorted(out, key=lambda s: (len(s), s))

    def count_by_dim(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for s in self.simplices():
            counts[len(s) - 1] = counts.get(len(s) - 1, 0) + 1
        return counts

    def edges(self) -> set[tuple[int, int]]:
        out = set()
        for f in self.facets:
            out.update(itertools.combinations(sorted(f), 2))
        return out

    def components(self) -> list[set[int]]:
        parent = list(range(self.n_vertices))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for u, v in self.edges():
            parent[find(u)] = find(v)
        groups: dict[int, set[int]] = {}
        for v in range(self.n_vertices):
            groups.setdefault(find(v), set()).add(v)
        return sorted(groups.values(), key=min)

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "simplices": [list(s) for s in self.simplices()]}

    @classmethod
    def from_json(cls, obj: dict) -> "SimplicialComplex":
        return cls.from_simplices(obj["vertices"], obj.get("simplices", []))


def _maximal(cands: Iterable[Simplex]) -> tuple[Simplex, ...]:
    by_vertex: dict[int, list[Simplex]] = {}
    kept: list[Simplex] = []
    for s in sorted(set(cands), key=lambda s: (-len(s), sorted(s))):
        if any(s <= f for f in by_vertex.get(min(s), [])):
            continue
        kept.append(s)
        for v in s:
            by_vertex.setdefault(v, []).append(s)
    return tuple(sorted(kept, key=lambda s: (len(s), sorted(s))))


@dataclass(frozen=True)
class BarycentricPoint:
    """A point of a simplex given by its vertices and positive barycentric weights."""

    simplex: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.simplex) != len(self.weights) or not self.simplex:
            raise PreconditionError("simplex and weights must be nonempty and of equal length")
        if len(set(self.simplex)) != len(self.simplex):
            raise PreconditionError("simplex vertices must be distinct")
        if any(not (0.0 < w <= 1.0) for w in self.weights):
            raise PreconditionError(f"barycentric weights must lie in (0, 1], got {self.weights}")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise PreconditionError(f"barycentric weights must sum to 1, got {math.fsum(self.weights)!r}")

    @classmethod
    def from_mapping(cls, weights: Mapping[int, float]) -> "BarycentricPoint":
        """Drop zero weights, normalise the rest, and sort by vertex."""
        items = sorted((int(v), float(w)) for v, w in weights.items() if w > 0)
        total = math.fsum(w for _, w in items)
        if not items or not total > 0:
            raise PreconditionError("need at least one positive weight")
        return cls(tuple(v for v, _ in items), tuple(w / total for _, w in items))

    @classmethod
    def vertex(cls, v: int) -> "BarycentricPoint":
        return cls((int(v),), (1.0,))

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.simplex, self.weights))

    def spherical_coordinates(self) -> dict[int, float]:
        """u_i = sqrt(t_i); these satisfy sum u_i^2 = 1."""
        return {v: math.sqrt(w) for v, w in zip(self.simplex, self.weights)}

    def dominant_vertex(self) -> int:
        """Vertex of largest weight, smallest index on ties."""
        return min(zip(self.simplex, self.weights), key=lambda vw: (-vw[1], vw[0]))[0]

    def to_json(self) -> dict:
        return {"simplex": list(self.simplex), "weights": list(self.weights)}


@dataclass(frozen=True)
class Cover:
    """Open balls B(center_i, radius_i) in one space."""

    space: SpaceDescriptor
    centers: tuple[Point, ...]
    radii: tuple[float, ...]

    def __post_init__(self):
        if len(self.centers) != len(self.radii):
            raise PreconditionError("centers and radii differ in length")
        if any(not r > 0 for r in self.radii):
            raise PreconditionError("cover radii must be positive")
        object.__setattr__(self, "centers", tuple(validate(self.space, c) for c in self.centers))
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))

    def __len__(self) -> int:
        return len(self.centers)

    def membership(self, pts: Sequence[Point]) -> np.ndarray:
        """Boolean matrix M[i, j]: point i lies in the open ball j."""
        if not pts:
            return np.zeros((0, len(self)), dtype=bool)
        return pairwise_distances(self.space, pts, self.centers) < np.asarray(self.radii)[None, :]

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "members": [{"center": c.to_json(), "radius": r} for c, r in zip(self.centers, self.radii)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Cover":
        space = space_from_json(obj["space"])
        members = obj["members"]
        return cls(
            space,
            tuple(point_from_json(space, m["center"]) for m in members),
            tuple(float(m["radius"]) for m in members),
        )


# -- nerves -------------------------------------------------------------------------


def _pair_witnesses(cover: Cover) -> list[Point]:
    """For each pair of overlapping balls, a point lying in both."""
    C = pairwise_distances(cover.space, cover.centers)
    r = np.asarray(cover.radii)
    out = []
    ii, jj = np.nonzero(np.triu(C < r[:, None] + r[None, :], 1))
    for i, j in zip(ii.tolist(), jj.tolist()):
        frac = r[i] / (r[i] + r[j])
        out.append(geodesic_point(cover.space, cover.centers[i], cover.centers[j], frac))
    return out


def nerve_with_witnesses(
    cover: Cover,
    window: Sequence[Point],
    *,
    extra_witnesses: Sequence[Point] = (),
    geometric: bool = True,
    max_dim: int | None = None,
) -> tuple[SimplicialComplex, list[Point]]:
    """Nerve of ``cover`` plus the geometric witness points it generated.

    A set of members spans a simplex when some witness lies in all of them.
    Witnesses are the window points, ``extra_witnesses``, and (if
    ``geometric``) a point on the geodesic between the centres of every
    overlapping pair, which makes the 1-skeleton exact.
    """
    window = [validate(cover.space, a) for a in window]
    M = cover.membership(window)
    if len(window) and not M.any(axis=1).all():
        bad = window[int(np.flatnonzero(~M.any(axis=1))[0])]
        raise CoverageError(f"window point {bad!r} is not covered")
    generated = _pair_witnesses(cover) if geometric else []
    extra = [validate(cover.space, a) for a in extra_witnesses] + generated
    if extra:
        M = np.vstack([M, cover.membership(extra)])
    sets = {frozenset(np.flatnonzero(row).tolist()) for row in M}
    sets.discard(frozenset())
    return SimplicialComplex.from_simplices(len(cover), sets, max_dim=max_dim), generated


def nerve(cover: Cover, window: Sequence[Point], *, max_dim: int | None = None) -> SimplicialComplex:
    return nerve_with_witnesses(cover, window, max_dim=max_dim)[0]


def nerve_map(cover: Cover, x: Point) -> BarycentricPoint:
    """Tent partition of unity: weights proportional to max(0, r_i - d(x, c_i))."""
    x = validate(cover.space, x)
    d = pairwise_distances(cover.space, [x], cover.centers)[0]
    w = np.asarray(cover.radii) - d
    support = np.flatnonzero(w > 0)
    if support.size == 0:
        raise CoverageError(f"{x!r} is not covered")
    return BarycentricPoint.from_mapping({int(i): float(w[i]) for i in support})


# -- spherical metric ----------------------------------------------------------------


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _arc(u: dict[int, float], v: dict[int, float]) -> float:
    keys = u.keys() | v.keys()
    chord = math.sqrt(math.fsum((u.get(k, 0.0) - v.get(k, 0.0)) ** 2 for k in keys))
    return 2.0 * math.asin(min(1.0, chord / 2.0))


def spherical_distance(
    complexY: SimplicialComplex, y1: BarycentricPoint, y2: BarycentricPoint, subdivision: int = 32
) -> float:
    """Path-metric distance between two points of the complex in spherical coordinates.

    Inside a simplex the spherical simplex is geodesically convex, so the
    distance is the great-circle arc.  Between simplices paths are chained
    through grid points of resolution 1/subdivision on the facets' boundary
    faces; the result decreases to the true distance as the grid refines and
    is exact on the 1-skeleton.
    """
    if int(subdivision) != subdivision or subdivision < 1:
        raise DomainError(f"subdivision must be a positive integer, got {subdivision}")
    for y in (y1, y2):
        if not complexY.contains(y.simplex):
            raise PreconditionError(f"{y.simplex} is not a simplex of the complex")
    if y1.as_dict() == y2.as_dict():
        return 0.0
    m = int(subdivision)
    keys: dict[tuple, int] = {}
    coords: list[dict[int, float]] = []

    def node(weights: dict[int, int] | None = None, point: BarycentricPoint | None = None) -> int:
        if point is not None:
            key = ("q",) + tuple(sorted(point.as_dict().items()))
            u = point.spherical_coordinates()
        else:
            key = tuple(sorted((v, k) for v, k in weights.items() if k > 0))
            u = {v: math.sqrt(k / m) for v, k in key}
        if key not in keys:
            keys[key] = len(coords)
            coords.append(u)
        return keys[key]

    q1, q2 = node(point=y1), node(point=y2)
    rows, cols, vals = [], [], []
    for f in complexY.facets:
        fs = sorted(f)
        members = []
        if len(fs) == 1:
            members.append(node({fs[0]: m}))
        else:
            for comp in _compositions(m, len(fs)):
                if 0 in comp:
                    members.append(node(dict(zip(fs, comp))))
        for q, y in ((q1, y1), (q2, y2)):
            if set(y.simplex) <= f:
                members.append(q)
        members = sorted(set(members))
        for a, b in itertools.combinations(members, 2):
            w = _arc(coords[a], coords[b])
            rows.append(a)
            cols.append(b)
            vals.append(max(w, 1e-300))
    n = len(coords)
    graph = coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    dist = dijkstra(graph, directed=False, indices=q1)
    if not math.isfinite(dist[q2]):
        raise UnreachableError("the two points lie in different components")
    return float(dist[q2])


# -- anti-Cech ladders ---------------------------------------------------------------


@dataclass
class AntiCechLevel:
    radius: float
    cover: Cover
    complex: SimplicialComplex


@dataclass
class AntiCechSystem:
    """Covers U_1, U_2, ... with nerves and coarsening vertex maps U_i -> U_{i+1}.

    ``maps[i][j]`` is the member of level i+1 containing member j of level i;
    ``slack[i][j]`` is R_{i+1} - d(c_j, c_{maps[i][j]}) - R_i >= 0, the
    containment witness.
    """

    space: SpaceDescriptor
    levels: list[AntiCechLevel]
    maps: list[list[int]]
    slack: list[list[float]] = field(default_factory=list)

    def composite(self, start: int, stop: int) -> list[int]:
        """Vertex map from level ``start`` to level ``stop`` (identity when equal)."""
        current = list(range(len(self.levels[start].cover)))
        for i in range(start, stop):
            current = [self.maps[i][v] for v in current]
        return current

    def summary(self) -> dict:
        return {
            "radii": [lv.radius for lv in self.levels],
            "nerve_sizes": [lv.complex.n_vertices for lv in self.levels],
            "nerve_dims": [lv.complex.max_dim for lv in self.levels],
            "min_slack": [min(s) if s else None for s in self.slack],
        }


def _is_simplicial(f: Sequence[int], source: SimplicialComplex, target: SimplicialComplex) -> Simplex | None:
    for s in source.facets:
        if not target.contains({f[v] for v in s}):
            return s
    return None


def anti_cech(
    space: SpaceDescriptor,
    window: Sequence[Point],
    base_radius: float,
    levels: int,
    *,
    factor: float = 3.0,
    max_dim: int | None = None,
    tol: float | None = None,
) -> AntiCechSystem:
    """Ladder of ball covers of radius R_i = base_radius * factor^(i-1).

    Each level is centred on a greedy (2 R_i / 3)-separated net of the window,
    so every window point is within 2 R_i / 3 < R_i of a centre and every
    ball of level i sits inside a ball of level i+1.  Witness points are
    carried up the ladder so that the coarsening maps are simplicial.
    """
    if not base_radius > 0:
        raise DomainError(f"base radius must be positive, got {base_radius}")
    if levels < 2:
        raise DomainError(f"need at least two levels, got {levels}")
    tol = default_tolerance() if tol is None else tol
    window = [validate(space, a) for a in window]
    if not window:
        raise PreconditionError("window must be nonempty")
    built: list[AntiCechLevel] = []
    pool: list[Point] = []
    for i in range(levels):
        R = base_radius * factor**i
        idx, _ = greedy_indices(space, window, 2.0 * R / 3.0)
        cover = Cover(space, tuple(window[j] for j in idx), (R,) * len(idx))
        cx, generated = nerve_with_witnesses(cover, window, extra_witnesses=pool, max_dim=max_dim)
        pool.extend(generated)
        built.append(AntiCechLevel(R, cover, cx))
    maps, slack = [], []
    for lo, hi in zip(built, built[1:]):
        D = pairwise_distances(space, lo.cover.centers, hi.cover.centers)
        room = hi.radius - lo.radius - D
        fmap, fslack = [], []
        for j, row in enumerate(room):
            ok = np.flatnonzero(row >= -tol)
            if ok.size == 0:
                raise InvariantViolation(f"ball {j} of radius {lo.radius} fits in no ball of radius {hi.radius}")
            fmap.append(int(ok[0]))
            fslack.append(float(row[ok[0]]))
        bad = _is_simplicial(fmap, lo.complex, hi.complex)
        if bad is not None:
            raise InvariantViolation(f"coarsening map is not simplicial on {sorted(bad)}")
        maps.append(fmap)
        slack.append(fslack)
    return AntiCechSystem(space, built, maps, slack)


# -- contiguity ----------------------------------------------------------------------


def is_contiguous(
    complexY: SimplicialComplex,
    f: Sequence[int] | Mapping[int, int],
    g: Sequence[int] | Mapping[int, int],
    target: SimplicialComplex,
) -> tuple[bool, tuple[int, ...] | None]:
    """Whether f(s) and g(s) together span a simplex of ``target`` for every simplex s.

    Returns ``(True, None)`` or ``(False, s)`` with an offending simplex.  Both
    maps must be simplicial; otherwise :class:`PreconditionError` is raised.
    """
    for name, h in (("f", f), ("g", g)):
        bad = _is_simplicial(h, complexY, target)
        if bad is not None:
            raise PreconditionError(f"{name} is not simplicial on {sorted(bad)}")
    for s in complexY.facets:
        if not target.contains({f[v] for v in s} | {g[v] for v in s}):
            return False, tuple(sorted(s))
    return True, None


def contiguity_search(system: AntiCechSystem, i: int) -> dict:
    """Search k >= i for which the two routes |U_i| -> |U_k| become contiguous.

    Route one sends a vertex of level i to its centre in X, then to the
    dominant vertex of its partition-of-unity image in |U_0|, then up the
    ladder; route two follows the coarsening maps from level i directly.
    Levels are 0-based.
    """
    if not (0 <= i < len(system.levels)):
        raise DomainError(f"level {i} out of range")
    first = system.levels[0].cover
    back = [nerve_map(first, c).dominant_vertex() for c in system.levels[i].cover.centers]
    source = system.levels[i].complex
    tried = []
    for k in range(i, len(system.levels)):
        up = system.composite(0, k)
        route_one = [up[v] for v in back]
        route_two = system.composite(i, k)
        target = system.levels[k].complex
        try:
            ok, witness = is_contiguous(source, route_one, route_two, target)
        except PreconditionError as exc:
            ok, witness = False, str(exc)
        tried.append({"k": k, "contiguous": ok, "witness": witness})
        if ok:
            return {"level": i, "k": k, "contiguous": True, "tried": tried}
    return {"level": i, "k": None, "contiguous": False, "tried": tried}
