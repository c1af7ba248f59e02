"""C1 piecewise polynomial interpolation on domains bounded by conic arcs."""

from .conic import Arc, Conic, Domain, intersect_ray_conic, normal_tangent_at, normalize_conic, oval_domain
from .interpolator import Spline, eval_spline, interp_buffer, interp_ordinary, interp_pie, interpolate
from .mesh import Mesh, Triangle, classify, generate_disk_mesh, inscribed_disk, shape_regularity, validate
from .nodal import HermiteData, NodalFunctional
from .norms import boundary_trace, c1_jump, error_norm, error_report, interpolation_residuals, vertex_mismatch
from .poly2 import Poly2
from .quadrature import quad_curved, quad_straight

__all__ = [
    "Arc", "Conic", "Domain", "HermiteData", "Mesh", "NodalFunctional", "Poly2", "Spline", "Triangle",
    "boundary_trace", "c1_jump", "classify", "error_norm", "error_report", "eval_spline", "generate_disk_mesh",
    "inscribed_disk", "interp_buffer", "interp_ordinary", "interp_pie", "interpolate", "interpolation_residuals",
    "intersect_ray_conic", "normal_tangent_at", "normalize_conic", "oval_domain", "quad_curved", "quad_straight",
    "shape_regularity", "validate", "vertex_mismatch",
]
