"""Network-availability lower bound for CoMP-enabled aerial HetNets.

The pipeline runs worst-case SNR -> effective bandwidth -> SNR thresholds ->
NA lower-bound product -> exhaustive (K, xi) search.
"""

from .availability import (HeterogeneityProfile, Composition, NaEstimate, TailEstimator,
                           na_lower_bound)
from .errors import AerialNaError, ConfigError, DomainError, InfeasibleError, NumericalError
from .optimizer import (POLICIES, evaluate_baseline, heterogeneity_profile, joint_optimize,
                        max_heterogeneity, optimize_k_only, optimize_xi_only)
from .scenario import Scenario

__version__ = "0.1.0"

__all__ = [
    "AerialNaError", "ConfigError", "DomainError", "InfeasibleError", "NumericalError",
    "Composition", "HeterogeneityProfile", "NaEstimate", "TailEstimator", "na_lower_bound",
    "POLICIES", "evaluate_baseline", "heterogeneity_profile", "joint_optimize",
    "max_heterogeneity", "optimize_k_only", "optimize_xi_only", "Scenario",
]
