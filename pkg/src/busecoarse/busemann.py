"""Busemann convexity checks, barycenters and geodesic homotopies."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError, UnsupportedConfigurationError
from .reports import CheckReport
from .spaces import (
    BLOCK,
    GLUED,
    HALFLINE,
    LP,
    RAY,
    Point,
    SpaceDescriptor,
    default_tolerance,
    distance,
    geodesic_point,
    validate,
)

__all__ = [
    "WeightedPoints",
    "ConvexityReport",
    "busemann_check",
    "convexity_sweep",
    "staircase_geodesic",
    "geodesic_law_defect",
    "barycenter",
    "barycenter_objective",
    "geodesic_homotopy",
    "homotopy_preimage_bound",
]

Path = Callable[[float], Point]


@dataclass(frozen=True)
class WeightedPoints:
    """Finitely many points with positive weights summing to one."""

    entries: tuple[tuple[Point, float], ...]

    def __post_init__(self):
        if not self.entries:
            raise PreconditionError("weighted point set must be nonempty")
        for _, w in self.entries:
            if not (0.0 < w <= 1.0):
                raise PreconditionError(f"weights must lie in (0, 1], got {w}")
        total = math.fsum(w for _, w in self.entries)
        if abs(total - 1.0) > 1e-12:
            raise PreconditionError(f"weights must sum to 1, got {total!r}")

    @classmethod
    def from_pairs(cls, points: Sequence[Point], weights: Sequence[float]) -> "WeightedPoints":
        if len(points) != len(weights):
            raise PreconditionError("points and weights differ in length")
        return cls(tuple((a, float(w)) for a, w in zip(points, weights)))

    @classmethod
    def normalized(cls, points: Sequence[Point], weights: Sequence[float]) -> "WeightedPoints":
        """Like :meth:`from_pairs` but rescales the weights to sum to one."""
        total = math.fsum(weights)
        if not total > 0:
            raise PreconditionError("weights must have a positive sum")
        return cls.from_pairs(points, [w / total for w in weights])

    @property
    def points(self) -> list[Point]:
        return [a for a, _ in self.entries]

    @property
    def weights(self) -> list[float]:
        return [w for _, w in self.entries]


@dataclass(frozen=True)
class ConvexityReport:
    lhs: float
    rhs: float
    margin: float
    satisfied: bool
    x_t: Point | None = None
    y_t: Point | None = None

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "satisfied": self.satisfied,
            "x_t": self.x_t.to_json() if self.x_t is not None else None,
            "y_t": self.y_t.to_json() if self.y_t is not None else None,
        }


def _check_t(t: float) -> float:
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"t must lie in [0, 1], got {t}")
    return t


def busemann_check(
    space: SpaceDescriptor,
    x0: Point,
    x1: Point,
    y0: Point,
    y1: Point,
    t: float,
    *,
    geodesic_x: Path | None = None,
    geodesic_y: Path | None = None,
    tol: float | None = None,
) -> ConvexityReport:
    """Evaluate both sides of d(x_t, y_t) <= (1-t) d(x0, y0) + t d(x1, y1).

    By default the geodesics are the ones produced by :func:`geodesic_point`.
    ``geodesic_x`` / ``geodesic_y`` substitute other parametrised geodesics
    (e.g. a staircase path in raw l_1), which is how non-uniqueness of
    geodesics shows up as a violation.
    """
    t = _check_t(t)
    tol = default_tolerance() if tol is None else tol
    x_t = geodesic_x(t) if geodesic_x is not None else geodesic_point(space, x0, x1, t)
    y_t = geodesic_y(t) if geodesic_y is not None else geodesic_point(space, y0, y1, t)
    lhs = distance(space, x_t, y_t)
    rhs = (1.0 - t) * distance(space, x0, y0) + t * distance(space, x1, y1)
    margin = rhs - lhs
    return ConvexityReport(lhs, rhs, margin, margin >= -tol, x_t, y_t)


def _lp_norms(v: np.ndarray, p: float) -> np.ndarray:
    m = np.abs(v).max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    return m * np.sum((np.abs(v) / safe[:, None]) ** p, axis=1) ** (1.0 / p)


def convexity_sweep(
    space: SpaceDescriptor,
    samples: int,
    rng: np.random.Generator,
    *,
    scale: float = 5.0,
    within_blocks: bool = False,
    tol: float | None = None,
) -> CheckReport:
    """Busemann inequality on ``samples`` random quadruples and parameters t.

    l_p spaces are swept in one vectorised batch.  In X_p the quadruples are
    drawn anywhere, or inside one random block when ``within_blocks`` is set.
    The report's margin is the minimum over the sweep.
    """
    from .sampling import random_point

    tol = default_tolerance() if tol is None else tol
    if samples < 1:
        raise DomainError(f"need at least one sample, got {samples}")
    if space.kind == LP:
        P = rng.uniform(-scale, scale, (4, samples, space.dim))
        t = rng.uniform(0.0, 1.0, samples)
        x0, x1, y0, y1 = P
        xt = (1 - t)[:, None] * x0 + t[:, None] * x1
        yt = (1 - t)[:, None] * y0 + t[:, None] * y1
        lhs = _lp_norms(xt - yt, space.p)
        rhs = (1 - t) * _lp_norms(x0 - y0, space.p) + t * _lp_norms(x1 - y1, space.p)
        margins = rhs - lhs
        k = int(np.argmin(margins))
        quad = [space.point(*P[j, k]) for j in range(4)]
        worst, t_worst = float(margins[k]), float(t[k])
    else:
        worst, quad, t_worst = math.inf, None, 0.0
        for _ in range(samples):
            if within_blocks and space.kind == GLUED:
                n = int(rng.integers(1, 5))
                pts = [space.block(n, rng.uniform(-scale, scale, n)) for _ in range(4)]
            else:
                pts = [random_point(space, rng, scale) for _ in range(4)]
            tt = float(rng.uniform())
            r = busemann_check(space, *pts, tt, tol=tol)
            if r.margin < worst:
                worst, quad, t_worst = r.margin, pts, tt
    return CheckReport(
        "busemann_convexity_sweep",
        worst >= -tol,
        worst,
        witness={"x0": quad[0], "x1": quad[1], "y0": quad[2], "y1": quad[3], "t": t_worst},
        stats={"samples": samples, "space": space.to_json()},
    )


def staircase_geodesic(space: SpaceDescriptor, a: Point, b: Point, corner: Point) -> Path:
    """Arc-length path a -> corner -> b made of two straight segments.

    Only accepted when the concatenation is itself a geodesic, i.e.
    d(a, corner) + d(corner, b) = d(a, b).  In l_1 this holds for any corner
    inside the coordinate box spanned by a and b.
    """
    if space.kind != LP:
        raise UnsupportedConfigurationError("staircase paths are defined for l_p spaces only")
    a, b, corner = (validate(space, z) for z in (a, b, corner))
    first = distance(space, a, corner)
    second = distance(space, corner, b)
    total = distance(space, a, b)
    if abs(first + second - total) > 1e-12 * max(1.0, total):
        raise PreconditionError(
            f"path through {corner!r} has length {first + second} > d(a, b) = {total}; not a geodesic"
        )

    def path(s: float) -> Point:
        s = _check_t(s)
        if s == 0.0:
            return a
        if s == 1.0:
            return b
        along = s * total
        if along <= first:
            return geodesic_point(space, a, corner, along / first) if first > 0 else a
        return geodesic_point(space, corner, b, (along - first) / second)

    return path


def geodesic_law_defect(space: SpaceDescriptor, path: Path, length: float, grid: Iterable[float]) -> float:
    """max |d(path(s), path(t)) - |s - t| * length| over pairs of grid parameters."""
    params = list(grid)
    pts = [path(s) for s in params]
    worst = 0.0
    for i, s in enumerate(params):
        for j in range(i + 1, len(params)):
            d = distance(space, pts[i], pts[j])
            worst = max(worst, abs(d - abs(s - params[j]) * length))
    return worst


# -- barycenters ------------------------------------------------------------------


def barycenter_objective(space: SpaceDescriptor, wp: WeightedPoints, x: Point) -> float:
    """sum_i w_i d(x, v_i)^2"""
    return math.fsum(w * distance(space, x, v) ** 2 for v, w in wp.entries)


def _lp_objective(x: np.ndarray, V: np.ndarray, w: np.ndarray, p: float) -> float:
    d = np.abs(x[None, :] - V)
    m = d.max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    norms = m * np.sum((d / safe[:, None]) ** p, axis=1) ** (1.0 / p)
    return float(np.dot(w, norms * norms))


def _lp_gradient(x: np.ndarray, V: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    diff = x[None, :] - V
    d = np.abs(diff)
    m = d.max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    scaled = d / safe[:, None]
    s = np.sum(scaled**p, axis=1)
    # grad ||u||^2 = 2 ||u||^(2-p) sign(u) |u|^(p-1), written scale-free
    # a vertex at x contributes nothing (the gradient of ||u||^2 vanishes at u = 0)
    coef = 2.0 * m * np.where(s > 0, s, 1.0) ** (2.0 / p - 1.0)
    g = coef[:, None] * np.sign(diff) * scaled ** (p - 1.0)
    return np.dot(w, g)


def _ternary_polish(x: np.ndarray, V, w, p, rounds: int = 60) -> np.ndarray:
    """Cyclic coordinate ternary search; slow but monotone."""
    x = x.copy()
    span = float(np.ptp(V, axis=0).max()) + 1.0
    for _ in range(rounds):
        before = x.copy()
        for j in range(x.size):
            lo, hi = x[j] - span, x[j] + span
            for _ in range(200):
                if hi - lo < 1e-13 * max(1.0, abs(lo)):
                    break
                m1 = lo + (hi - lo) / 3.0
                m2 = hi - (hi - lo) / 3.0
                x[j] = m1
                f1 = _lp_objective(x, V, w, p)
                x[j] = m2
                f2 = _lp_objective(x, V, w, p)
                if f1 <= f2:
                    hi = m2
                else:
                    lo = m1
            x[j] = 0.5 * (lo + hi)
        span = max(float(np.abs(x - before).max()) * 4.0, 1e-9)
        if np.abs(x - before).max() < 1e-13:
            break
    return x


def _lp_barycenter(V: np.ndarray, w: np.ndarray, p: float, tol: float, max_iter: int) -> np.ndarray:
    mean = np.dot(w, V)
    if p == 2.0 or V.shape[1] == 1:
        # every l_p metric on R^1 is |x - y|, so the weighted mean is optimal there too
        return mean
    x = mean
    f = _lp_objective(x, V, w, p)
    g = _lp_gradient(x, V, w, p)
    step = 0.5
    prev_x = prev_g = None
    stalled = False
    for _ in range(max_iter):
        gnorm2 = float(np.dot(g, g))
        if gnorm2 == 0.0:
            break
        if prev_x is not None:
            sx, sg = x - prev_x, g - prev_g
            denom = float(np.dot(sx, sg))
            if denom > 0:
                step = float(np.dot(sx, sx)) / denom
        alpha = step
        while True:
            trial = x - alpha * g
            ft = _lp_objective(trial, V, w, p)
            if ft <= f - 1e-4 * alpha * gnorm2:
                break
            alpha *= 0.5
            if alpha < 1e-30:
                stalled = True
                break
        if stalled:
            break
        prev_x, prev_g = x, g
        x, f_old, f = trial, f, ft
        g = _lp_gradient(x, V, w, p)
        if f_old - f <= tol * 1e-6 * max(1.0, f) and float(np.abs(x - prev_x).max()) < 1e-12 * max(
            1.0, float(np.abs(x).max())
        ):
            break
    if stalled or float(np.linalg.norm(g)) > 1e-6 * max(1.0, f):
        x = _ternary_polish(x, V, w, p)
    return x


def barycenter(
    space: SpaceDescriptor, wp: WeightedPoints, *, tol: float = 1e-8, max_iter: int = 10_000
) -> Point:
    """Unique minimiser of x -> sum_i w_i d(x, v_i)^2.

    l_p blocks are solved by gradient descent with Armijo backtracking and
    Barzilai-Borwein step lengths, started at the Euclidean weighted mean and
    polished by coordinate ternary search when the line search stalls.  In X_p
    all points must share one geodesically convex chart (one block, or the
    ray); mixed configurations raise :class:`UnsupportedConfigurationError`.
    """
    if not isinstance(wp, WeightedPoints):
        raise PreconditionError("barycenter expects WeightedPoints")
    if not space.is_busemann:
        raise UnsupportedConfigurationError(f"{space} is not a Busemann space; barycenters are not unique")
    pts = [validate(space, a) for a in wp.points]
    w = np.asarray(wp.weights, dtype=float)
    if len(pts) == 1:
        return pts[0]
    if space.kind == HALFLINE or (space.kind == GLUED and all(a.tag == RAY for a in pts)):
        return Point(RAY, t=float(np.dot(w, [a.t for a in pts])))
    if space.kind == LP:
        V = np.array([a.coords for a in pts], dtype=float)
        x = _lp_barycenter(V, w, space.p, tol, max_iter)
        return Point(BLOCK, n=space.dim, coords=tuple(float(c) for c in x))
    blocks = {a.n for a in pts if a.tag == BLOCK}
    if len(blocks) != 1:
        raise UnsupportedConfigurationError(
            f"points lie in blocks {sorted(blocks)} of {space}; mixed-block barycenters are not supported"
        )
    (n,) = blocks
    if any(a.tag == RAY and a.t != n for a in pts):
        raise UnsupportedConfigurationError(
            f"points mix block {n} with the ray away from its gluing point; not supported"
        )
    V = np.array([a.coords if a.tag == BLOCK else (0.0,) * n for a in pts], dtype=float)
    x = _lp_barycenter(V, w, space.p, tol, max_iter)
    return validate(space, Point(BLOCK, n=n, coords=tuple(float(c) for c in x)))


# -- homotopies -------------------------------------------------------------------


def geodesic_homotopy(space: SpaceDescriptor, phi: Callable[[Point], Point], x: Point, t: float) -> Point:
    """h(x, t): the point at fraction t along the geodesic from x to phi(x)."""
    return geodesic_point(space, x, phi(x), t)


def homotopy_preimage_bound(
    space: SpaceDescriptor,
    phi: Callable[[Point], Point],
    t: float,
    sample: Sequence[Point],
    center: Point,
    radius: float,
) -> tuple[float, int]:
    """Sampled properness witness for h(., t).

    Returns ``(bound, count)``: the largest d(center, x) over sample points x
    with h(x, t) in the closed ball B(center, radius), and how many there were.
    """
    bound, count = 0.0, 0
    for x in sample:
        if distance(space, center, geodesic_homotopy(space, phi, x, t)) <= radius:
            count += 1
            bound = max(bound, distance(space, center, x))
    return bound, count
