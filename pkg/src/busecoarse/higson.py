"""Sampled certification that pulled-back functions f o pi_t are Higson.

The bookkeeping follows the classical argument: take a modulus delta of
uniform continuity on B(o, t + R), put S = max(t, tR/delta), and for a, b
outside B(o, S) with d(a, b) < R compare F(a), F(b) through the contracted
points delta_{t/r}(a), delta_{t/r}(b).  Sampling can refute the Higson
property or support it; it never proves it, and reports say which.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boundary import project
from .errors import DomainError, EvaluationError
from .reports import FAIL, INCONCLUSIVE, PASS
from .sampling import ball_sample, perturb, sphere_sample
from .spaces import (
    HALFLINE,
    LP,
    RAY,
    Point,
    SpaceDescriptor,
    basepoint,
    distance,
    pairwise_distances,
    validate,
)

__all__ = [
    "BUILTIN_FUNCTIONS",
    "Pullback",
    "builtin_function",
    "pullback",
    "uniform_modulus",
    "HigsonCheckReport",
    "ShellResult",
    "higson_certify",
]

ScalarFunction = Callable[[Point], float]

BUILTIN_FUNCTIONS = ("constant", "coordinate", "radial", "angular", "sin-radial")


class Pullback:
    """F = f o pi_t, the extension of a function on B(o, t) to the whole space."""

    def __init__(self, space: SpaceDescriptor, o: Point, t: float, f: ScalarFunction):
        self.space, self.o, self.t, self.f = space, o, t, f

    def __call__(self, a: Point) -> float:
        return self.f(project(self.space, self.o, self.t, a))

    def __repr__(self) -> str:
        return f"Pullback(t={self.t:g}, f={self.f!r})"


def pullback(space: SpaceDescriptor, o: Point | None, t: float, f: ScalarFunction) -> Pullback:
    if not t > 0:
        raise DomainError(f"pullback radius must be positive, got {t}")
    o = basepoint(space) if o is None else validate(space, o)
    if isinstance(f, Pullback) and f.space == space and f.o == o and f.t == t:
        return f
    return Pullback(space, o, t, f)


def _first_coordinate(space: SpaceDescriptor, o: Point, a: Point) -> float:
    if space.kind == LP:
        return a.coords[0] - o.coords[0]
    if space.kind == HALFLINE:
        return a.t - o.t
    return a.coords[0] if a.tag != RAY else 0.0


def _angular(space: SpaceDescriptor, o: Point, t: float, a: Point) -> float:
    # sin(3 theta) of the first two coordinates, damped radially so it is continuous at the centre
    if space.kind == HALFLINE:
        return min(a.t - o.t, t) / t
    if space.kind == LP:
        v = [x - y for x, y in zip(a.coords, o.coords)]
    elif a.tag == RAY:
        return 0.0
    else:
        v = list(a.coords)
    if len(v) == 1:
        return max(-1.0, min(1.0, v[0] / t))
    r = math.hypot(v[0], v[1])
    if r == 0.0:
        return 0.0
    return min(r, t) / t * math.sin(3.0 * math.atan2(v[1], v[0]))


def builtin_function(name: str, space: SpaceDescriptor, o: Point | None = None, t: float = 1.0) -> tuple[ScalarFunction, bool]:
    """Named test function and whether it is meant to be pulled back.

    ``sin-radial`` (x -> sin d(o, x)) is returned with ``False``: it is the
    negative control and is tested as is, not through pi_t.
    """
    o = basepoint(space) if o is None else validate(space, o)
    if name == "constant":
        return (lambda a: 1.0), True
    if name == "coordinate":
        return (lambda a: _first_coordinate(space, o, a)), True
    if name == "radial":
        return (lambda a: distance(space, o, a)), True
    if name == "angular":
        return (lambda a: _angular(space, o, t, a)), True
    if name == "sin-radial":
        return (lambda a: math.sin(distance(space, o, a))), False
    raise KeyError(f"unknown built-in function {name!r}; choose from {', '.join(BUILTIN_FUNCTIONS)}")


def _evaluate(f: ScalarFunction, pts: list[Point]) -> np.ndarray:
    values = np.array([f(a) for a in pts], dtype=float)
    if not np.all(np.isfinite(values)):
        bad = pts[int(np.flatnonzero(~np.isfinite(values))[0])]
        raise EvaluationError(f"function is not finite at {bad!r}")
    return values


def uniform_modulus(
    space: SpaceDescriptor,
    f: ScalarFunction,
    epsilon: float,
    radius: float,
    o: Point | None = None,
    *,
    anchors: int = 300,
    ladder: int = 14,
    seed: int = 0,
) -> float:
    """Sampled modulus of uniform continuity of ``f`` on B(o, radius).

    Pairs are drawn from ``anchors`` random points of the ball and from
    neighbours of each anchor at dyadic distances diam * 2^-k, k = 1..ladder.
    The smallest distance of a pair with |f(a) - f(b)| >= epsilon is halved
    for safety; with no such pair the diameter bound 2 * radius is returned.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    o = basepoint(space) if o is None else validate(space, o)
    rng = np.random.default_rng(seed)
    diameter = 2.0 * radius
    base = ball_sample(space, o, radius, anchors, rng)
    base_values = _evaluate(f, base)
    dists = [pairwise_distances(space, base)[np.triu_indices(len(base), 1)]]
    diffs = [np.abs(base_values[:, None] - base_values[None, :])[np.triu_indices(len(base), 1)]]
    for k in range(1, ladder + 1):
        scale = diameter * 2.0**-k
        nbrs = []
        for a in base:
            b = perturb(space, a, float(rng.uniform(0.5, 1.0)) * scale, rng)
            nbrs.append(project(space, o, radius, b))
        nvals = _evaluate(f, nbrs)
        dists.append(np.array([distance(space, a, b) for a, b in zip(base, nbrs)]))
        diffs.append(np.abs(base_values - nvals))
    d = np.concatenate(dists)
    v = np.concatenate(diffs)
    bad = (v >= epsilon) & (d > 0)
    if not bad.any():
        return diameter
    return min(diameter, 0.5 * float(d[bad].min()))


@dataclass
class ShellResult:
    radius: float
    pairs_tested: int
    max_violation: float
    witness: tuple[Point, Point] | None = None

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "pairs_tested": self.pairs_tested,
            "max_violation": self.max_violation,
            "witness": None if self.witness is None else [w.to_json() for w in self.witness],
        }


@dataclass
class HigsonCheckReport:
    """Outcome of a sampled Higson certification.

    ``max_violation`` is the largest |F(a) - F(b)| seen over admissible pairs;
    it is below ``epsilon`` exactly when no witness was found.
    """

    epsilon: float
    R: float
    t: float
    delta: float
    S: float
    pairs_tested: int
    max_violation: float
    witness: tuple[Point, Point] | None
    status: str
    shells: list[ShellResult] = field(default_factory=list)
    pulled_back: bool = True

    @property
    def certified(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "R": self.R,
            "t": self.t,
            "delta": self.delta,
            "S": self.S,
            "pairs_tested": self.pairs_tested,
            "max_violation": self.max_violation,
            "witness": None if self.witness is None else [w.to_json() for w in self.witness],
            "status": self.status,
            "pulled_back": self.pulled_back,
            "shells": [s.to_json() for s in self.shells],
        }


def higson_certify(
    space: SpaceDescriptor,
    o: Point | None,
    t: float,
    f: ScalarFunction,
    epsilon: float,
    R: float,
    *,
    pull_back: bool = True,
    shells: int = 5,
    directions: int = 200,
    seed: int = 0,
    modulus_anchors: int = 300,
) -> HigsonCheckReport:
    """Test the Higson condition for F = f o pi_t beyond the certified radius S.

    Shells sit at radii S * 2^j, j = 1..shells; each gets ``directions``
    anchors a on the sphere of that radius and a partner b with
    d(a, b) < R.  Only pairs with min(d(o, a), d(o, b)) > S count.
    With ``pull_back=False`` the function is tested as given, which is
    how non-pullbacks serve as negative controls.
    """
    if not (epsilon > 0 and R > 0 and t > 0):
        raise DomainError("epsilon, R and t must all be positive")
    o = basepoint(space) if o is None else validate(space, o)
    F = pullback(space, o, t, f) if pull_back else f
    delta = uniform_modulus(space, F, epsilon, t + R, o, anchors=modulus_anchors, seed=seed)
    S = max(t, t * R / delta)
    rng = np.random.default_rng(seed + 1)
    results = []
    for j in range(1, shells + 1):
        r = S * 2.0**j
        worst, tested, witness = 0.0, 0, None
        for _ in range(directions):
            a = sphere_sample(space, o, r, rng)
            b = perturb(space, a, float(rng.uniform(0.0, R)), rng)
            if not distance(space, a, b) < R:
                continue
            if not min(distance(space, o, a), distance(space, o, b)) > S:
                continue
            gap = abs(F(a) - F(b))
            if not math.isfinite(gap):
                raise EvaluationError(f"function is not finite near {a!r}")
            tested += 1
            if gap > worst:
                worst = gap
                if gap >= epsilon:
                    witness = (a, b)
        results.append(ShellResult(r, tested, worst, witness))
    total = sum(s.pairs_tested for s in results)
    worst_shell = max(results, key=lambda s: s.max_violation)
    witness = next((s.witness for s in results if s.witness is not None), None)
    if witness is not None:
        status = FAIL
    elif total == 0:
        status = INCONCLUSIVE
    else:
        status = PASS
    return HigsonCheckReport(
        epsilon=epsilon,
        R=R,
        t=t,
        delta=delta,
        S=S,
        pairs_tested=total,
        max_violation=worst_shell.max_violation,
        witness=witness,
        status=status,
        shells=results,
        pulled_back=pull_back,
    )
