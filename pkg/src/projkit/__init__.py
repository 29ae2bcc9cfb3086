"""projkit: metric projections onto closed convex sets and what they build.

Exact and iterative projectors, the convex potential whose gradient is the
projection, contraction fixed points and their monotone profiles, level-set
extremizers with derivative diagnostics, solvability of projection-operator
equations, and weighted residual extrema over finite atom spaces.
"""

from ._kernels import BACKEND
from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    LevelRangeError,
    PreconditionError,
    SpecValidationError,
)
from .sets import (
    Ball,
    Box,
    ConvexSetSpec,
    Halfspace,
    Hyperplane,
    Intersection,
    NormLevel,
    Simplex,
    Translate,
    as_vector,
    contains,
    is_bounded,
    set_from_json,
    set_from_json_obj,
    set_to_json,
    set_to_json_obj,
)
from .projector import IterationPolicy, Projector, project, project_origin
from .functional import (
    j_gradient_fd,
    j_value,
    j_value_batch,
    j_via_line_integral,
    residual_sq,
    residual_sq_batch,
)
from .geometry import (
    check_idempotence,
    check_neg_fixed_point,
    check_nonexpansive,
    check_ray_invariance,
    check_variational_inequality,
)
# the fixed_point function itself stays at projkit.fixed_point.fixed_point;
# exporting it here would shadow the submodule name
from .fixed_point import (
    FixedPointResult,
    Profile,
    fixed_point_grid,
    g_value,
    g_values,
    h_value,
    h_values,
    invert_monotone,
    profile,
)
from .levelset import (
    GammaRow,
    continuity_scan,
    gamma_direct,
    gamma_profile_report,
    gamma_value,
    gamma_values,
    level_set_samples,
    minimal_norm_point,
    phi_value,
    phi_values,
    sphere_max_point,
    sphere_min_point,
)
from .equation import (
    CoordinatewiseOddPower,
    IdentityPotential,
    LambdaStarEstimate,
    LinearSymmetricPSD,
    SolveResult,
    check_monotone,
    lambda_star_estimate,
    potential_value,
    potential_value_quadrature,
    solve_projection_equation,
)
from .integral import (
    ConstraintClass,
    DiscreteMeasureSpace,
    ExtremaRecord,
    StepFunction,
    constraint_value,
    ellipse_grid_extremum,
    extremize_over_U,
    integral_residual,
    verify_extrema_equalities,
)
from .report import CheckReport, format_real
from .config import Budgets, RGridRel, ScenarioConfig, Tolerances, load_config, parse_config

__version__ = "0.1.0"
