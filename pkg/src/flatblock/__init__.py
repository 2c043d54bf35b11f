"""Exact blocking and illumination computations on translation surfaces."""

from .blocking import (
    BlockingInstance,
    bc_report,
    certify_non_illumination,
    disjoint_family_lower_bound,
    lift_blocking_to_cover,
    min_stab,
    torus_blocking_set,
    verify_blocking,
)
from .builders import builtin, golden_l, l_shaped, octagon, origami, staircase, torus
from .cylinders import cylinder_decomposition, purely_periodic_in_direction
from .exactnum import Mat2, Scalar, Vec2, cross, dot, norm_sq, parse_scalar, scalar_sign, vec
from .holonomy import torus_cover
from .surface import Surface, SurfacePoint, build_surface, gl2_act, load_surface
from .tracer import Segment, saddle_connections, segments_between, trace
from .unfolding import polygon, unfold_billiard

__version__ = "0.1.0"

__all__ = [
    "BlockingInstance",
    "Mat2",
    "Scalar",
    "Segment",
    "Surface",
    "SurfacePoint",
    "Vec2",
    "bc_report",
    "build_surface",
    "builtin",
    "certify_non_illumination",
    "cross",
    "cylinder_decomposition",
    "disjoint_family_lower_bound",
    "dot",
    "gl2_act",
    "golden_l",
    "l_shaped",
    "lift_blocking_to_cover",
    "load_surface",
    "min_stab",
    "norm_sq",
    "octagon",
    "origami",
    "parse_scalar",
    "polygon",
    "purely_periodic_in_direction",
    "saddle_connections",
    "scalar_sign",
    "segments_between",
    "staircase",
    "torus",
    "torus_blocking_set",
    "torus_cover",
    "trace",
    "unfold_billiard",
    "vec",
]
