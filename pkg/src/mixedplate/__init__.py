"""Kirchhoff plate bending by three consecutive second-order problems, with
the boundary coupling enforced through a discrete Lagrange multiplier space,
discretized with maximally smooth splines on exact single-patch geometries."""

from .benchmarks import disk_plate_exact, get_benchmark, square_plate_exact
from .geometry import BC, GeometryPatch, corner_angles, unit_disk_patch, unit_square_patch
from .material import IsotropicMaterial, apply_C, apply_C_inverse, sym_curl
from .multipliers import MultiplierSpace
from .pipeline import PlateProblem, PlateSolution, solve_plate
from .spaces import ConstrainedSpace, SplineSpace
from .verification import convergence_study, error_norms

__version__ = "0.1.0"

__all__ = [
    "BC",
    "ConstrainedSpace",
    "GeometryPatch",
    "IsotropicMaterial",
    "MultiplierSpace",
    "PlateProblem",
    "PlateSolution",
    "SplineSpace",
    "apply_C",
    "apply_C_inverse",
    "convergence_study",
    "corner_angles",
    "disk_plate_exact",
    "error_norms",
    "get_benchmark",
    "solve_plate",
    "square_plate_exact",
    "sym_curl",
    "unit_disk_patch",
    "unit_square_patch",
]
