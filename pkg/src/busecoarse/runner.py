"""Experiment runner: validate a config dict, dispatch to one command, and
assemble a JSON-serialisable report.

A config is a flat object::

    {"command": "net", "space": "halfline", "seed": 0,
     "window": {"start": 0, "stop": 10, "step": 1}, "epsilon": 1.5}

``space`` accepts the compact form (``lp:2:2``, ``raw-lp:1:2``, ``halfline``,
``glued:2``) or the JSON object form.  Every report has the keys command,
config, verdict, result, witnesses, timing and version.
"""
from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from . import __version__
from .boundary import compactified_from_json, contraction, project, project_between
from .busemann import (
    WeightedPoints,
    barycenter,
    barycenter_objective,
    busemann_check,
    convexity_sweep,
    geodesic_law_defect,
    staircase_geodesic,
)
from .coarse import coarseness_profile, approximation_bound_check, sample_map
from .complexes import (
    BarycentricPoint,
    Cover,
    SimplicialComplex,
    anti_cech,
    contiguity_search,
    is_contiguous,
    nerve,
    spherical_distance,
)
from .errors import BusecoarseError, InvalidPointError, InvalidSpaceError
from .higson import BUILTIN_FUNCTIONS, builtin_function, higson_certify
from .kinv import sphere_k_homology, xp_boundary_factors, xp_boundary_k
from .nets import (
    DiscreteSample,
    bounded_geometry_profile,
    covering_certificate,
    gamma_k,
    greedy_net,
    packing_covering_sandwich,
    packing_set,
    write_growth_csv,
)
from .reports import FAIL, INCONCLUSIVE, PASS, to_jsonable
from .sampling import ball_grid, halfline_window
from .spaces import (
    HALFLINE,
    LP,
    SpaceDescriptor,
    basepoint,
    default_tolerance,
    distance,
    lp_space,
    parse_space,
    point_from_json,
    space_from_json,
)

__all__ = ["COMMANDS", "ConfigError", "run", "exit_code"]

OK = "ok"


class ConfigError(BusecoarseError, ValueError):
    """The config does not match the command's schema."""


# -- config helpers -------------------------------------------------------------------


class _Recording(dict):
    """A dict that remembers which keys were looked at."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.read: set = set()

    def get(self, key, default=None):
        self.read.add(key)
        return super().get(key, default)

    def __getitem__(self, key):
        self.read.add(key)
        return super().__getitem__(key)

    def __contains__(self, key):
        self.read.add(key)
        return super().__contains__(key)


class Params:
    def __init__(self, config: dict):
        self.config = _Recording(config)

    def unused(self) -> list[str]:
        return sorted(k for k in self.config if k not in self.config.read and k != "command")

    def get(self, key: str, default=None):
        return self.config.get(key, default)

    def require(self, key: str):
        if key not in self.config:
            raise ConfigError(f"missing required parameter {key!r}")
        return self.config[key]

    def number(self, key: str, default: float | None = None) -> float:
        raw = self.config.get(key, default) if default is not None else self.require(key)
        try:
            value = float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"parameter {key!r} must be a number, got {raw!r}") from None
        if math.isnan(value):
            raise ConfigError(f"parameter {key!r} is NaN")
        return value

    def integer(self, key: str, default: int | None = None) -> int:
        raw = self.config.get(key, default) if default is not None else self.require(key)
        if isinstance(raw, bool) or not isinstance(raw, (int, float)) or int(raw) != raw:
            raise ConfigError(f"parameter {key!r} must be an integer, got {raw!r}")
        return int(raw)

    def flag(self, key: str, default: bool = False) -> bool:
        raw = self.config.get(key, default)
        if not isinstance(raw, bool):
            raise ConfigError(f"parameter {key!r} must be true or false, got {raw!r}")
        return raw

    def space(self, default: str | None = None) -> SpaceDescriptor:
        raw = self.config.get("space", default)
        if raw is None:
            raise ConfigError("missing required parameter 'space'")
        if isinstance(raw, str):
            return parse_space(raw)
        return space_from_json(raw)

    def point(self, space: SpaceDescriptor, key: str, default=None):
        raw = self.config.get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required parameter {key!r}")
            return default
        return point_from_json(space, raw)

    def points(self, space: SpaceDescriptor, key: str) -> list:
        raw = self.require(key)
        if not isinstance(raw, list):
            raise ConfigError(f"parameter {key!r} must be a list of points")
        return [point_from_json(space, a) for a in raw]


def _window(params: Params, space: SpaceDescriptor, key: str = "window") -> list:
    """A list of points, or a generated grid.

    ``{"start", "stop", "step"}`` gives equally spaced half-line points;
    ``{"radius", "step"[, "center"]}`` gives the grid of that ball.
    """
    raw = params.require(key)
    if isinstance(raw, list):
        return [point_from_json(space, a) for a in raw]
    if not isinstance(raw, dict):
        raise ConfigError(f"parameter {key!r} must be a list of points or a grid description")
    if "start" in raw:
        if space.kind != HALFLINE:
            raise ConfigError("start/stop/step windows are for the half-line")
        return halfline_window(float(raw["start"]), float(raw["stop"]), float(raw["step"]))
    if "radius" in raw:
        center = point_from_json(space, raw["center"]) if "center" in raw else basepoint(space)
        return ball_grid(space, center, float(raw["radius"]), float(raw.get("step", 1.0)))
    raise ConfigError(f"cannot interpret window {raw!r}")


def _complex(params: Params, key: str = "complex") -> SimplicialComplex:
    raw = params.require(key)
    if not isinstance(raw, dict) or "vertices" not in raw:
        raise ConfigError(f"parameter {key!r} must be {{'vertices': ..., 'simplices': ...}}")
    vertices = raw["vertices"]
    return SimplicialComplex.from_simplices(vertices if isinstance(vertices, int) else list(vertices), raw.get("simplices", []))


def _barycentric(raw) -> BarycentricPoint:
    if isinstance(raw, int):
        return BarycentricPoint.vertex(raw)
    if isinstance(raw, dict) and "simplex" in raw:
        return BarycentricPoint(tuple(int(v) for v in raw["simplex"]), tuple(float(w) for w in raw["weights"]))
    if isinstance(raw, dict):
        return BarycentricPoint.from_mapping({int(k): float(v) for k, v in raw.items()})
    raise ConfigError(f"cannot read barycentric point {raw!r}")


# -- commands -------------------------------------------------------------------------
# Each returns (verdict, result, witnesses).


def _busemann_check(params: Params, rng, tol):
    space = params.space()
    samples = params.integer("samples", 1000)
    witnesses = {}
    checks = []
    if samples > 0:
        sweep = convexity_sweep(space, samples, rng, within_blocks=params.flag("within_blocks"), tol=tol)
        checks.append(sweep)
        if not sweep.passed:
            witnesses["sweep"] = sweep.witness
    if params.flag("include_staircase_geodesics"):
        if space.kind != LP or space.dim < 2:
            raise ConfigError("staircase geodesics need an l_p space of dimension >= 2")
        zero = space.point(*([0.0] * space.dim))
        one = space.point(*([1.0] * space.dim))
        corner = space.point(*([1.0] + [0.0] * (space.dim - 1)))
        stair = staircase_geodesic(space, zero, one, corner)
        defect = geodesic_law_defect(space, stair, distance(space, zero, one), np.linspace(0, 1, 21))
        rep = busemann_check(space, zero, one, zero, one, 0.5, geodesic_y=stair, tol=tol)
        checks.append(rep)
        result_stair = {**rep.to_json(), "staircase_geodesic_law_defect": defect}
        if not rep.satisfied:
            witnesses["staircase"] = {
                "x0": zero,
                "x1": one,
                "y0": zero,
                "y1": one,
                "corner": corner,
                "t": 0.5,
                "x_t": rep.x_t,
                "y_t": rep.y_t,
            }
    else:
        result_stair = None
    if not checks:
        raise ConfigError("nothing to check: samples is 0 and no staircase test requested")
    margins = [c.margin for c in checks]
    passed = all((c.passed if hasattr(c, "passed") else c.satisfied) for c in checks)
    result = {"min_margin": min(margins), "samples": samples, "tolerance": tol}
    if samples > 0:
        result["sweep_min_margin"] = checks[0].margin
    if result_stair is not None:
        result["staircase"] = result_stair
    return (PASS if passed else FAIL), result, witnesses


def _barycenter(params: Params, rng, tol):
    space = params.space()
    pts = params.points(space, "points")
    raw_w = params.get("weights")
    weights = [1.0 / len(pts)] * len(pts) if raw_w is None else [float(w) for w in raw_w]
    wp = WeightedPoints.normalized(pts, weights) if params.flag("normalize") else WeightedPoints.from_pairs(pts, weights)
    m = barycenter(space, wp)
    return OK, {"barycenter": m, "objective": barycenter_objective(space, wp, m)}, {}


def _project(params: Params, rng, tol):
    space = params.space()
    o = params.point(space, "o", basepoint(space))
    t = params.number("t")
    if "s" in params.config:
        a = params.point(space, "z")
        return OK, {"point": project_between(space, o, params.number("s"), t, a, tol=tol)}, {}
    z = compactified_from_json(space, params.require("z"))
    p = project(space, o, t, z)
    return OK, {"point": p, "distance_from_o": distance(space, o, p)}, {}


def _contraction(params: Params, rng, tol):
    space = params.space()
    o = params.point(space, "o", basepoint(space))
    z = compactified_from_json(space, params.require("z"))
    s = params.number("s")
    return OK, {"point": contraction(space, o, z, s)}, {}


def _higson(params: Params, rng, tol):
    space = params.space()
    o = params.point(space, "o", basepoint(space))
    t = params.number("t", 1.0)
    name = params.get("function", "angular")
    if name not in BUILTIN_FUNCTIONS:
        raise ConfigError(f"unknown function {name!r}; choose from {', '.join(BUILTIN_FUNCTIONS)}")
    f, pull = builtin_function(name, space, o, t)
    rep = higson_certify(
        space,
        o,
        t,
        f,
        params.number("epsilon", 0.1),
        params.number("R", 1.0),
        pull_back=params.flag("pull_back", pull),
        shells=params.integer("shells", 5),
        directions=params.integer("directions", 200),
        seed=params.integer("seed", 0),
    )
    witnesses = {"pair": rep.witness} if rep.witness is not None else {}
    return rep.status, rep.to_json(), witnesses


def _test_map(name: str, space: SpaceDescriptor, params: Params):
    if space.kind != LP:
        raise ConfigError("coarse-profile maps are defined on l_p spaces")
    if name == "identity":
        return lambda a: a
    if name == "scale":
        c = params.number("factor", 2.0)
        return lambda a: space.point(*[c * x for x in a.coords])
    if name == "shift":
        v = params.get("offset", [1.0] + [0.0] * (space.dim - 1))
        return lambda a: space.point(*[x + float(d) for x, d in zip(a.coords, v)])
    if name == "collapse":
        return lambda a: basepoint(space)
    raise ConfigError(f"unknown map {name!r}; choose identity, scale, shift or collapse")


def _coarse_profile(params: Params, rng, tol):
    space = params.space()
    pts = _window(params, space)
    f = _test_map(params.get("map", "identity"), space, params)
    radii = params.get("radii", [1.0, 2.0, 4.0])
    prof = coarseness_profile(sample_map(space, pts, f, space), radii)
    witnesses = {"unbounded_preimage": prof.witness} if prof.witness is not None else {}
    return (PASS if prof.proper else FAIL), prof.to_json(), witnesses


def _random_instance(rng, dim: int, p: float, spread: float):
    cx = SimplicialComplex.from_simplices(dim + 1, [tuple(range(dim + 1))])
    space = lp_space(p, 2)
    centre = rng.uniform(-5, 5, 2)
    vm = [space.point(*(centre + rng.uniform(-spread, spread, 2))) for _ in range(dim + 1)]
    return cx, vm, space


def _approx_map(params: Params, rng, tol):
    count = params.integer("eval_points", 50)
    slack = params.number("slack", 1e-6)
    if "complex" in params.config:
        cx = _complex(params)
        space = params.space()
        vm = params.points(space, "vertex_map")
        instances = [(cx, vm, space)]
    else:
        n = params.integer("instances", 20)
        dims = [int(rng.integers(1, 4)) for _ in range(n)]
        ps = params.get("p_values", [2.0, 3.0])
        instances = [_random_instance(rng, d, float(ps[i % len(ps)]), 1.0) for i, d in enumerate(dims)]
    reports = []
    for cx, vm, space in instances:
        ys = []
        for _ in range(count):
            facet = sorted(cx.facets[int(rng.integers(len(cx.facets)))])
            w = rng.dirichlet(np.ones(len(facet)))
            ys.append(BarycentricPoint.from_mapping(dict(zip(facet, w))))
        ys.extend(BarycentricPoint.vertex(v) for v in range(cx.n_vertices))
        reports.append(approximation_bound_check(cx, vm, ys, space, slack=slack))
    worst = min(reports, key=lambda r: r.margin)
    passed = all(r.passed for r in reports)
    result = {
        "instances": len(reports),
        "min_margin": worst.margin,
        "reports": [{"C": r.stats["C"], "margin": r.margin, "max_distance_to_f": r.stats["max_distance_to_f"]} for r in reports],
    }
    return (PASS if passed else FAIL), result, ({} if passed else {"worst": worst.witness})


def _cover(params: Params, space: SpaceDescriptor) -> Cover:
    centers = params.points(space, "centers")
    radii = params.require("radii")
    if not isinstance(radii, list):
        radii = [float(radii)] * len(centers)
    return Cover(space, tuple(centers), tuple(float(r) for r in radii))


def _nerve(params: Params, rng, tol):
    space = params.space()
    cover = _cover(params, space)
    window = _window(params, space) if "window" in params.config else list(cover.centers)
    cx = nerve(cover, window, max_dim=params.get("max_dim"))
    return OK, {"complex": cx, "count_by_dim": cx.count_by_dim()}, {}


def _anti_cech_system(params: Params):
    space = params.space()
    window = _window(params, space)
    return anti_cech(space, window, params.number("base_radius", 1.0), params.integer("levels", 3), tol=None)


def _anti_cech(params: Params, rng, tol):
    system = _anti_cech_system(params)
    result = system.summary()
    result["maps"] = system.maps
    result["containment_slack"] = system.slack
    sizes = result["nerve_sizes"]
    result["sizes_nonincreasing"] = all(b <= a for a, b in zip(sizes, sizes[1:]))
    return PASS, result, {}


def _spherical(params: Params, rng, tol):
    cx = _complex(params)
    y1, y2 = _barycentric(params.require("y1")), _barycentric(params.require("y2"))
    d = spherical_distance(cx, y1, y2, params.integer("subdivision", 32))
    return OK, {"distance": d, "in_right_angles": d / (math.pi / 2)}, {}


def _contiguity(params: Params, rng, tol):
    if "f" in params.config:
        cx = _complex(params)
        target = _complex(params, "target") if "target" in params.config else cx
        f, g = params.require("f"), params.require("g")
        ok, witness = is_contiguous(cx, f, g, target)
        return (PASS if ok else FAIL), {"contiguous": ok}, ({} if ok else {"simplex": witness})
    system = _anti_cech_system(params)
    level = params.integer("level", 1)
    found = contiguity_search(system, level)
    return (PASS if found["contiguous"] else FAIL), found, {}


def _net(params: Params, rng, tol):
    space = params.space()
    window = DiscreteSample(tuple(_window(params, space)), space)
    cert = greedy_net(window, params.number("epsilon"))
    ok = cert.verify()
    return (PASS if ok else FAIL), {**cert.to_json(), "verified": ok}, {}


def _bg_profile(params: Params, rng, tol):
    space = params.space()
    sample = DiscreteSample(tuple(_window(params, space)), space)
    return OK, {"profile": bounded_geometry_profile(sample, params.number("R"), tol=tol), "size": len(sample)}, {}


def _packing(params: Params, rng, tol):
    space = params.space()
    x = params.point(space, "x", basepoint(space))
    R, eps = params.number("R"), params.number("epsilon")
    res = params.get("resolution")
    pts = packing_set(space, x, R, eps, res)
    result = {"count": len(pts), "points": pts, "kind": "lower_bound"}
    verdict = OK
    if params.flag("sandwich", True):
        sw = packing_covering_sandwich(space, x, R, eps, res)
        result["sandwich"] = sw.stats
        verdict = PASS if sw.passed else FAIL
    return verdict, result, {}


def _covering(params: Params, rng, tol):
    space = params.space()
    x = params.point(space, "x", basepoint(space))
    R, eps = params.number("R"), params.number("epsilon")
    res = params.get("resolution")
    cert = covering_certificate(space, x, R, eps, res)
    ok = cert.covered_radius <= eps + tol
    return (PASS if ok else FAIL), {**cert.to_json(), "kind": "certificate"}, {}


def _gamma_k(params: Params, rng, tol):
    p = params.number("p", 2.0)
    k = params.integer("k", 2)
    R = params.number("R", 2.0)
    ns = params.get("n", [1, 2, 3, 4, 5, 6])
    ns = [int(ns)] if isinstance(ns, (int, float)) else [int(n) for n in ns]
    rows = []
    for n in ns:
        sample = gamma_k(p, k, n, R)
        rows.append((n, len(sample)))
    counts = [c for _, c in rows]
    increasing = all(b > a for a, b in zip(counts, counts[1:]))
    result = {"rows": [{"n": n, "count": c} for n, c in rows], "csv": write_growth_csv(rows), "strictly_increasing": increasing}
    if len(ns) == 1:
        result["points"] = list(gamma_k(p, k, ns[0], R).points)
    return OK, result, {}


def _kinv(params: Params, rng, tol):
    q = params.integer("q", 0)
    if "m" in params.config:
        return OK, sphere_k_homology(params.integer("m"), q), {}
    truncate = params.get("truncate")
    if truncate is None:
        return OK, xp_boundary_k(q), {}
    g = xp_boundary_k(q, int(truncate))
    return OK, {**g.to_json(), "blocks": xp_boundary_factors(q, int(truncate))}, {}


COMMANDS: dict[str, Callable] = {
    "busemann-check": _busemann_check,
    "barycenter": _barycenter,
    "project": _project,
    "contraction": _contraction,
    "higson-certify": _higson,
    "coarse-profile": _coarse_profile,
    "approx-map": _approx_map,
    "nerve": _nerve,
    "anti-cech": _anti_cech,
    "spherical-dist": _spherical,
    "contiguity": _contiguity,
    "net": _net,
    "bg-profile": _bg_profile,
    "packing": _packing,
    "covering": _covering,
    "gamma-k": _gamma_k,
    "kinv": _kinv,
}


def run(config: dict) -> dict:
    """Execute one command and return its report.

    Raises :class:`ConfigError` for schema problems and the module errors
    for failed preconditions; a failed check is a normal report with
    verdict ``"fail"``.
    """
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    command = config.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {', '.join(sorted(COMMANDS))}")
    config = {**config, "seed": config.get("seed", 0)}
    params = Params(config)
    seed = params.integer("seed")
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    tol = params.number("tolerance", default_tolerance())
    if not tol > 0:
        raise ConfigError("tolerance must be positive")
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    verdict, result, witnesses = COMMANDS[command](params, rng, tol)
    elapsed = time.perf_counter() - start
    if params.unused():
        raise ConfigError(f"{command} does not take parameter(s) {', '.join(params.unused())}")
    return to_jsonable(
        {
            "command": command,
            "config": config,
            "verdict": verdict,
            "result": result,
            "witnesses": witnesses,
            "timing": {"seconds": elapsed},
            "version": __version__,
        }
    )


USAGE, PRECONDITION, CHECK_FAILED = 2, 3, 4


def exit_code(report: dict | None = None, error: BaseException | None = None) -> int:
    """0 for success, 2 for usage errors, 3 for failed preconditions, 4 for failed checks."""
    if error is not None:
        if isinstance(error, (ConfigError, InvalidSpaceError, InvalidPointError, KeyError, TypeError)):
            return USAGE
        return PRECONDITION
    if report is not None and report.get("verdict") in (FAIL, INCONCLUSIVE):
        return CHECK_FAILED
    return 0
