"""Geometry toolkit for Busemann spaces: geodesics and barycenters, radial
projections onto balls and the visual boundary, sampled Higson checks,
nerves and anti-Cech ladders, separated nets and packing numbers.
"""
__version__ = "0.1.0"

from .boundary import (
    BoundaryPoint,
    busemann_contraction_bound,
    contraction,
    project,
    project_between,
    ray_end,
    sphere_direction,
)
from .busemann import WeightedPoints, barycenter, busemann_check, convexity_sweep, geodesic_homotopy
from .complexes import (
    BarycentricPoint,
    Cover,
    SimplicialComplex,
    anti_cech,
    is_contiguous,
    nerve,
    nerve_map,
    spherical_distance,
)
from .errors import BusecoarseError
from .kinv import AbelianGroupDescriptor, sphere_k_homology, xp_boundary_k
from .reports import CheckReport
from .spaces import (
    Point,
    SpaceDescriptor,
    delta,
    distance,
    geodesic_point,
    glued_xp,
    half_line,
    lp_space,
    raw_lp_space,
)

__all__ = [
    "__version__",
    "AbelianGroupDescriptor",
    "anti_cech",
    "barycenter",
    "BarycentricPoint",
    "BoundaryPoint",
    "BusecoarseError",
    "busemann_check",
    "busemann_contraction_bound",
    "CheckReport",
    "contraction",
    "convexity_sweep",
    "Cover",
    "delta",
    "distance",
    "geodesic_homotopy",
    "geodesic_point",
    "glued_xp",
    "half_line",
    "is_contiguous",
    "lp_space",
    "nerve",
    "nerve_map",
    "Point",
    "project",
    "project_between",
    "raw_lp_space",
    "ray_end",
    "SimplicialComplex",
    "SpaceDescriptor",
    "sphere_direction",
    "sphere_k_homology",
    "spherical_distance",
    "WeightedPoints",
    "xp_boundary_k",
]
