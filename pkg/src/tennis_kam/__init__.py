"""Converse-KAM analysis of the bouncing ball on a periodically moving racket."""

from .criteria import (
    ABRecord,
    CriterionReport,
    DBounds,
    ThresholdReport,
    ab_along_orbit,
    d_bounds,
    estimate_bc,
    refined_criterion,
    second_variation_test,
    simple_criterion,
    tennis_ab_asymptotic,
    tennis_thresholds,
)
from .explorer import (
    DiffusionResult,
    EnsembleSpec,
    OrbitStats,
    diffusion_search,
    ensemble_run,
    layer_scan,
    lyapunov_max,
    rotation_number,
)
from .profile import Harmonic, ProfileNorms, RacketProfile, check_main_condition, check_pustylnikov, norms
from .reference import IntegrableMap, StandardMap, TennisSystem, make_system
from .tennis import (
    DomainError,
    OrbitSegment,
    SolverError,
    TennisParams,
    bouncing_motion,
    gen_fun,
    jacobian_te,
    solve_bounce_time,
    step_te,
    step_tv,
)

__version__ = "0.1.0"
