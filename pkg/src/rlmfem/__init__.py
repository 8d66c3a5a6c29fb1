"""P1 finite elements for 2D elasticity with immersed circular inclusions.

Each inclusion is coupled to the solid through a few Fourier modes of a
Lagrange multiplier on its boundary circle.
"""

from .coupling import Inclusion, assemble_coupling, assemble_reduced_rhs, circle_quadrature, fourier_mode, reconstruct_traction
from .errors import (
    ArgumentError,
    ConfigError,
    ConvergenceError,
    DefinitenessError,
    GeometryError,
    LocationError,
    PlacementError,
    RankError,
    RlmError,
)
from .fem import apply_dirichlet, assemble_load, assemble_stiffness, build_space, error_norms, evaluate_field
from .mesh import Mesh, circle_band_marker, generate_disc_mesh, generate_rect_mesh, locate_point, refine_local, refine_uniform
from .postprocess import AnalyticAxisym, boundary_stress_integral, effective_bulk, effective_shear, eoc, mode_report
from .solver import SaddleSystem, factor_primal, solve_saddle, verify_residuals

__version__ = "0.1.0"
