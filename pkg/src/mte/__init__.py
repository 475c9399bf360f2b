"""Exact limits of median-treatment-effect estimation from marginal data."""

from .core import (
    Joint,
    Marginal,
    OutcomeSpace,
    OutcomeVectorPair,
    in_quantile_band,
    make_joint,
    make_marginal,
    marginals_of,
    q_lower_joint,
    q_lower_vec,
    q_upper_joint,
    q_upper_vec,
)
from .estimator import EstimateResult, ResponseData, empirical_marginals, median_estimate
from .oracle import lp_max_region_mass, oracle_variability
from .sim import (
    bernoulli_observe,
    coverage_experiment,
    extremal_marginals,
    indistinguishability_experiment,
    psi,
    sample_joint,
    typical_sample,
)
from .variability import (
    VariabilityPair,
    WidthReport,
    min_median_width,
    variability,
    variability_lower,
    variability_upper,
    width_of_r,
    witness_joint_lower,
)

__version__ = "0.1.0"
