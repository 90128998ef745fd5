"""Pointwise plausibility intervals for normal means under a Hölder constraint."""

from .gauss import CriticalValue, critical_value, phi, phi_inv
from .harness import (
    Design,
    ExperimentConfig,
    TrialRecord,
    Truth,
    coverage_estimate,
    fit_curve,
    run_n_point,
    run_two_point,
)
from .im_core import (
    Method,
    PlausibilityInterval,
    SingletonAssertion,
    conditional_two_point_plausibility,
    conditional_two_point_region,
    one_point_belief,
    one_point_plausibility,
    one_point_region,
)
from .model import Dataset, DomainError, HolderConfig, NeighborView, neighbor_view, pairwise_bound
from .partial_cond import (
    MixingWeights,
    OptimizerOptions,
    PredictiveSpec,
    baseline_interval,
    delta_lambda,
    interval_for_point,
    optimize_weights,
    predictive_spec,
    two_point_optimal,
    width_gradient,
    width_objective,
)

__version__ = "0.1.0"
