"""Biased two-choices opinion dynamics: simulation and exact analytics.

n agents hold binary opinions.  Each step, a uniform random agent either
adopts the superior opinion (probability alpha) or polls two random
neighbours and keeps the majority of the three opinions involved.  The
package provides interaction-graph builders, a compiled simulator, exact
birth-death analytics for the complete graph (including the critical start
fraction below which weakly biased consensus takes exponential time), and a
reproducible Monte Carlo harness with a CSV/JSON command-line front end.
"""

from .analysis import (
    CRITICAL_BIAS,
    BirthDeathKernel,
    DriftExtrema,
    MeanTime,
    Regime,
    ThresholdReport,
    ThresholdUndefinedError,
    VisitProfile,
    classify_regime,
    consensus_time_lower_bound,
    critical_fraction,
    drift_extrema,
    drift_ratio,
    log_drift_integral,
    mean_consensus_time,
    mean_time_from_visits,
    threshold_report,
    transition_kernel,
    visit_profile,
)
from .montecarlo import (
    AllTrialsCappedError,
    ConsensusStats,
    ExperimentSpec,
    GraphSpec,
    SweepPoint,
    run_experiment,
    sweep,
)
from .protocol import (
    DEFAULT_STEP_CAP,
    ModelParams,
    OpinionState,
    RunResult,
    init_state,
    run_to_consensus,
    step,
)
from .topology import (
    GraphGenerationError,
    GraphTopology,
    make_complete,
    make_erdos_renyi,
    make_random_regular,
)

__version__ = "0.1.0"

__all__ = [
    "CRITICAL_BIAS",
    "DEFAULT_STEP_CAP",
    "AllTrialsCappedError",
    "BirthDeathKernel",
    "ConsensusStats",
    "DriftExtrema",
    "ExperimentSpec",
    "GraphGenerationError",
    "GraphSpec",
    "GraphTopology",
    "MeanTime",
    "ModelParams",
    "OpinionState",
    "Regime",
    "RunResult",
    "SweepPoint",
    "ThresholdReport",
    "ThresholdUndefinedError",
    "VisitProfile",
    "classify_regime",
    "consensus_time_lower_bound",
    "critical_fraction",
    "drift_extrema",
    "drift_ratio",
    "init_state",
    "log_drift_integral",
    "make_complete",
    "make_erdos_renyi",
    "make_random_regular",
    "mean_consensus_time",
    "mean_time_from_visits",
    "run_experiment",
    "run_to_consensus",
    "step",
    "sweep",
    "threshold_report",
    "transition_kernel",
    "visit_profile",
    "__version__",
]
