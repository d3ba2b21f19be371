"""Average age-of-information analysis and simulation for hierarchical
three-phase update schemes on large random networks."""

from .age_renewal import (
    AgeEstimate,
    SessionTrace,
    average_age_formula,
    average_age_session_end,
    time_average_from_trace,
)
from .hierarchy import (
    ExponentChoice,
    HierarchyConfig,
    PhaseMoments,
    alpha,
    average_age_analytic,
    exact_mimo_phase_mean,
    general_h_exponent_schedule,
    optimize_exponents,
    phase_moments_approx,
    session_moments,
)
from .moments import MomentPair, iid_sum, independent_total
from .order_stats import (
    OrderStatSpec,
    expected_order_stat,
    gsum,
    harmonic,
    sample_all_order_stats,
    sample_order_stat,
    second_moment_order_stat,
    variance_order_stat,
)
from .scaling_fit import SlopeFit, fit_scaling_exponent
from .simulator import (
    CountPlan,
    ExperimentResult,
    SessionSample,
    plan_schedule,
    recursive_phase1,
    run_experiment,
    simulate_session_bounded,
    simulate_session_exact,
    simulate_sessions,
)

__all__ = [
    "AgeEstimate",
    "SessionTrace",
    "average_age_formula",
    "average_age_session_end",
    "time_average_from_trace",
    "ExponentChoice",
    "HierarchyConfig",
    "PhaseMoments",
    "alpha",
    "average_age_analytic",
    "exact_mimo_phase_mean",
    "general_h_exponent_schedule",
    "optimize_exponents",
    "phase_moments_approx",
    "session_moments",
    "MomentPair",
    "iid_sum",
    "independent_total",
    "OrderStatSpec",
    "expected_order_stat",
    "gsum",
    "harmonic",
    "sample_all_order_stats",
    "sample_order_stat",
    "second_moment_order_stat",
    "variance_order_stat",
    "SlopeFit",
    "fit_scaling_exponent",
    "CountPlan",
    "ExperimentResult",
    "SessionSample",
    "plan_schedule",
    "recursive_phase1",
    "run_experiment",
    "simulate_session_bounded",
    "simulate_session_exact",
    "simulate_sessions",
]

__version__ = "0.1.0"
