"""Numerical laboratory for radial solutions of a coupled k-Hessian system.

The package classifies exponent configurations, integrates the radial
profiles in conservative variables, runs the small-ball fixed-point
construction, studies the associated log-radius dynamical system, and
checks the power-law growth predicted for global solutions.
"""

from .config import (
    BOTH_BLOWUP,
    BOUNDED,
    NO_SOLUTION,
    U_FINITE_V_BLOWUP,
    DerivedConstants,
    ExponentConfig,
    Regime,
    classify,
    classify_sigma,
    config_from_dict,
    derived,
    validate,
)
from .errors import (
    DegenerateDeltaError,
    DegenerateStateError,
    DomainError,
    InsufficientRangeError,
    NoConvergenceError,
    NotABlowupError,
    PreconditionError,
    SigmaUndefinedError,
)
from .radial import (
    BLOWUP_DETECTED,
    REACHED_RMAX,
    STEP_UNDERFLOW,
    BlowupReport,
    EstimateViolation,
    IntegrateOptions,
    RadialState,
    RadialTrajectory,
    Terminal,
    check_estimates,
    estimate_blowup_rate,
    integrate,
    scale_solution,
    scaling_residual,
    startup,
)
from .picard import GridFunctionPair, PicardResult, apply_map, picard_solve, picard_solve_auto
from .dynamics import (
    BoundaryEquilibrium,
    BoundViolation,
    CooperativityReport,
    DynState,
    DynTrajectory,
    Equilibrium,
    StabilityReport,
    boundary_equilibria,
    chain_rule_defect,
    check_trajectory_bounds,
    cooperativity_check,
    dyn_image,
    early_time_limits,
    equilibrium,
    flow_integrate,
    flow_order_preserved,
    linearization,
    stability,
    to_dyn,
    vector_field,
)
from .asymptotics import (
    AsymptoticProfile,
    ConvergenceReport,
    convergence_report,
    profile,
    ratio_arrays,
    singular_residual,
)

__version__ = "0.1.0"

__all__ = [
    "BOTH_BLOWUP",
    "BOUNDED",
    "NO_SOLUTION",
    "U_FINITE_V_BLOWUP",
    "BLOWUP_DETECTED",
    "REACHED_RMAX",
    "STEP_UNDERFLOW",
    "AsymptoticProfile",
    "BlowupReport",
    "BoundViolation",
    "BoundaryEquilibrium",
    "ConvergenceReport",
    "CooperativityReport",
    "DegenerateDeltaError",
    "DegenerateStateError",
    "DerivedConstants",
    "DomainError",
    "DynState",
    "DynTrajectory",
    "Equilibrium",
    "EstimateViolation",
    "ExponentConfig",
    "GridFunctionPair",
    "InsufficientRangeError",
    "IntegrateOptions",
    "NoConvergenceError",
    "NotABlowupError",
    "PicardResult",
    "PreconditionError",
    "RadialState",
    "RadialTrajectory",
    "Regime",
    "SigmaUndefinedError",
    "StabilityReport",
    "Terminal",
    "apply_map",
    "boundary_equilibria",
    "chain_rule_defect",
    "check_estimates",
    "check_trajectory_bounds",
    "classify",
    "classify_sigma",
    "config_from_dict",
    "convergence_report",
    "cooperativity_check",
    "derived",
    "dyn_image",
    "early_time_limits",
    "equilibrium",
    "estimate_blowup_rate",
    "flow_integrate",
    "flow_order_preserved",
    "integrate",
    "linearization",
    "picard_solve",
    "picard_solve_auto",
    "profile",
    "ratio_arrays",
    "scale_solution",
    "scaling_residual",
    "singular_residual",
    "stability",
    "startup",
    "to_dyn",
    "validate",
    "vector_field",
]
