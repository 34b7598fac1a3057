"""Randomized vector-valued mean computation: estimators, hard instances, experiments."""

from .estimators import (
    AdaptiveConfig,
    BudgetAudit,
    a1_norm_estimate,
    a2_mean,
    a3_allocate,
    a3_first_stage,
    a3_mean,
    default_m,
    holder_exponent_p1,
    median_scalar,
    zero_algorithm,
)
from .hard_instances import BlockPartition, InstanceSpec, blocks, draw
from .harness import TrialRecord, RateFit, estimate_error, fit_rate, gap_experiment, predicted_rate
from .rng_streams import SeedSpec, Stream, derive
from .tensor_space import DiscreteFunction, ExponentPair, lp_norm, mean_rows, norm_witness, operator_norm

__version__ = "0.1.0"
