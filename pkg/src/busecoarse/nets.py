"""Separated nets, bounded-geometry profiles, packing and covering numbers,
and the lattice nets (kZ)^n inside the blocks of X_p.

Continuous balls are replaced by lexicographic grids, so packing counts are
lower bounds and covering counts are certificates with explicit centres;
nothing here claims to compute the suprema exactly.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import DomainError, InvariantViolation, PreconditionError
from .reports import CheckReport
from .sampling import ball_grid
from .spaces import (
    BLOCK,
    Point,
    SpaceDescriptor,
    default_tolerance,
    glued_xp,
    pairwise_distances,
    point_from_json,
    space_from_json,
    validate,
)

__all__ = [
    "DiscreteSample",
    "NetCertificate",
    "CoveringCertificate",
    "greedy_indices",
    "greedy_net",
    "bounded_geometry_profile",
    "packing_set",
    "packing_number",
    "covering_certificate",
    "covering_number",
    "packing_covering_sandwich",
    "gamma_k",
    "gamma_k_union",
    "growth_table",
    "write_growth_csv",
    "net_geometry_ladder",
]

_CHUNK = 512


@dataclass(frozen=True)
class DiscreteSample:
    """Finitely many pairwise distinct points of one ambient space."""

    points: tuple[Point, ...]
    ambient: SpaceDescriptor

    def __post_init__(self):
        pts = tuple(validate(self.ambient, a) for a in self.points)
        if len(set(pts)) != len(pts):
            raise PreconditionError("sample points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {"ambient": self.ambient.to_json(), "points": [a.to_json() for a in self.points]}

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteSample":
        space = space_from_json(obj["ambient"])
        return cls(tuple(point_from_json(space, a) for a in obj["points"]), space)


@dataclass(frozen=True)
class NetCertificate:
    """An epsilon-separated subset of a window that is C-dense in it."""

    epsilon: float
    C: float
    net: DiscreteSample
    window: DiscreteSample | None = None

    def verify(self) -> bool:
        pts = list(self.net.points)
        D = pairwise_distances(self.net.ambient, pts)
        np.fill_diagonal(D, np.inf)
        separated = len(pts) < 2 or bool(D.min() > self.epsilon)
        if self.window is None:
            return separated
        dense = bool(pairwise_distances(self.net.ambient, list(self.window.points), pts).min(axis=1).max() <= self.C)
        return separated and dense

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "C": self.C, "size": len(self.net), "net": self.net.to_json()}


def _rows(space: SpaceDescriptor, pts: Sequence[Point]):
    """Yield (start, block of distance rows) over the full distance matrix."""
    for start in range(0, len(pts), _CHUNK):
        yield start, pairwise_distances(space, pts[start : start + _CHUNK], pts)


def greedy_indices(space: SpaceDescriptor, pts: Sequence[Point], epsilon: float) -> tuple[list[int], float]:
    """Greedy maximal epsilon-separated subset in the given order.

    Returns the kept indices and the density C = max_i min_kept d(p_i, kept).
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not pts:
        return [], 0.0
    kept: list[int] = []
    for start, block in _rows(space, pts):
        for r, row in enumerate(block):
            if not kept or row[kept].min() > epsilon:
                kept.append(start + r)
    C = 0.0
    for _, block in _rows(space, pts):
        C = max(C, float(block[:, kept].min(axis=1).max()))
    return kept, C


def greedy_net(window: DiscreteSample, epsilon: float) -> NetCertificate:
    """Greedy maximal epsilon-separated subset of ``window`` (input order), with its density."""
    idx, C = greedy_indices(window.ambient, list(window.points), epsilon)
    net = DiscreteSample(tuple(window.points[i] for i in idx), window.ambient)
    cert = NetCertificate(epsilon, C, net, window)
    if C > epsilon:
        raise InvariantViolation(f"greedy net has density {C} > epsilon = {epsilon}")
    return cert


def bounded_geometry_profile(gamma: DiscreteSample, R: float, *, tol: float | None = None) -> int:
    """max over gamma of #(B(gamma, R) intersected with the sample)."""
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    tol = default_tolerance() if tol is None else tol
    pts = list(gamma.points)
    best = 0
    for _, block in _rows(gamma.ambient, pts):
        best = max(best, int((block <= R + tol).sum(axis=1).max()))
    return best


def _ball_sample(space, x, R, resolution):
    x = validate(space, x)
    grid = ball_grid(space, x, R, resolution)
    # put the centre first so that a single ball suffices whenever epsilon >= R
    rest = [a for a in grid if a != x]
    return [x] + rest, grid


def packing_set(
    space: SpaceDescriptor, x: Point, R: float, epsilon: float, resolution: float | None = None
) -> list[Point]:
    """Largest greedy epsilon-separated subset of a grid sample of B(x, R).

    Two greedy orders are tried, plain lexicographic and centre-first; the
    larger result is kept.  Its size is a lower bound for the packing number.
    """
    if not (R > 0 and epsilon > 0):
        raise DomainError("R and epsilon must be positive")
    h = epsilon / 10.0 if resolution is None else resolution
    centre_first, lex = _ball_sample(space, x, R, h)
    best: list[Point] = []
    for order in (lex, centre_first):
        idx, _ = greedy_indices(space, order, epsilon)
        if len(idx) > len(best):
            best = [order[i] for i in idx]
    return best


def packing_number(
    space: SpaceDescriptor, x: Point, R: float, epsilon: float, resolution: float | None = None
) -> int:
    return len(packing_set(space, x, R, epsilon, resolution))


@dataclass(frozen=True)
class CoveringCertificate:
    """Centres whose closed epsilon-balls cover the grid sample of B(x, R).

    ``covered_radius`` is the largest distance from a sample point to its
    nearest centre; adding ``resolution`` bounds the radius needed to cover
    the continuous ball.
    """

    count: int
    centers: tuple[Point, ...]
    epsilon: float
    resolution: float
    covered_radius: float

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "centers": [a.to_json() for a in self.centers],
            "epsilon": self.epsilon,
            "resolution": self.resolution,
            "covered_radius": self.covered_radius,
        }


def covering_certificate(
    space: SpaceDescriptor, x: Point, R: float, epsilon: float, resolution: float | None = None
) -> CoveringCertificate:
    """Greedy set cover of a grid sample of B(x, R) by closed epsilon-balls.

    Candidate centres are the sample points themselves; each round takes the
    candidate covering the most uncovered points, ties going to the earlier
    candidate in centre-first lexicographic order.
    """
    if not (R > 0 and epsilon > 0):
        raise DomainError("R and epsilon must be positive")
    h = epsilon / 10.0 if resolution is None else resolution
    order, _ = _ball_sample(space, x, R, h)
    reach = np.vstack([block <= epsilon for _, block in _rows(space, order)])
    uncovered = np.ones(len(order), dtype=bool)
    chosen: list[int] = []
    while uncovered.any():
        gains = reach[:, uncovered].sum(axis=1)
        best = int(np.argmax(gains))
        chosen.append(best)
        uncovered &= ~reach[best]
    D = np.vstack([block[:, chosen] for _, block in _rows(space, order)])
    return CoveringCertificate(len(chosen), tuple(order[i] for i in chosen), epsilon, h, float(D.min(axis=1).max()))


def covering_number(
    space: SpaceDescriptor, x: Point, R: float, epsilon: float, resolution: float | None = None
) -> int:
    return covering_certificate(space, x, R, epsilon, resolution).count


def packing_covering_sandwich(
    space: SpaceDescriptor, x: Point, R: float, epsilon: float, resolution: float | None = None
) -> CheckReport:
    """Check packing(eps) >= covering(eps) >= packing(2 eps) on one common grid."""
    h = epsilon / 10.0 if resolution is None else resolution
    p1 = packing_number(space, x, R, epsilon, h)
    c1 = covering_number(space, x, R, epsilon, h)
    p2 = packing_number(space, x, R, 2 * epsilon, h)
    margin = min(p1 - c1, c1 - p2)
    return CheckReport(
        "packing_covering_sandwich",
        margin >= 0,
        float(margin),
        stats={"packing_eps": p1, "covering_eps": c1, "packing_2eps": p2, "resolution": h},
    )


# -- lattice nets in X_p ------------------------------------------------------------


def _lattice_points(p: float, k: int, n: int, R: float) -> list[tuple[int, ...]]:
    """Integer vectors m with ||k m||_p <= R, by pruned recursion over coordinates."""
    budget = (R / k) ** p * (1 + 1e-12)
    bound = int(math.floor(R / k + 1e-12))
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], used: float):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for m in range(-bound, bound + 1):
            cost = used + abs(m) ** p
            if cost <= budget:
                prefix.append(m)
                rec(prefix, cost)
                prefix.pop()

    rec([], 0.0)
    return out


def gamma_k(space_p: float, k: int, n: int, R: float) -> DiscreteSample:
    """(kZ)^n intersected with B(0, R), placed in block n of X_p."""
    if int(k) != k or k < 1 or int(n) != n or n < 1:
        raise DomainError("k and n must be positive integers")
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    space = glued_xp(space_p)
    pts = tuple(
        validate(space, Point(BLOCK, n=n, coords=tuple(float(k * m) for m in vec)))
        for vec in _lattice_points(space.p, k, n, R)
    )
    return DiscreteSample(pts, space)


def gamma_k_union(space_p: float, k: int, n_max: int, R: float) -> DiscreteSample:
    """The part of Gamma_k = disjoint union of (kZ)^n lying in B(0_n, R) for n = 1..n_max."""
    space = glued_xp(space_p)
    pts: list[Point] = []
    for n in range(1, n_max + 1):
        pts.extend(gamma_k(space_p, k, n, R).points)
    return DiscreteSample(tuple(pts), space)


def growth_table(space_p: float, k: int, R: float, ns: Iterable[int]) -> list[tuple[int, int]]:
    return [(n, len(gamma_k(space_p, k, n, R))) for n in ns]


def write_growth_csv(rows: Iterable[tuple[int, int]], out: TextIO | None = None) -> str:
    """Write (n, count) rows as CSV; returns the text and also writes it to ``out`` if given."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "count"])
    for n, count in rows:
        writer.writerow([n, count])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def net_geometry_ladder(window: DiscreteSample, eps_ladder: Iterable[float], R: float) -> list[dict]:
    """For each separation in the ladder: size, density and R-profile of the greedy net."""
    rows = []
    for eps in eps_ladder:
        cert = greedy_net(window, eps)
        rows.append(
            {
                "epsilon": eps,
                "net_size": len(cert.net),
                "density": cert.C,
                "profile": bounded_geometry_profile(cert.net, R),
            }
        )
    return rows
