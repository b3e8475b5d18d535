"""Certify continuous-variable EPR steering from discretized joint data.

Fano steering bounds upper-bound the conditional entropies in the discrete
entropic steering inequality using only measured agreement probabilities
and domain probabilities, so steering can be certified (and hedged against
finite detector range, dead space, and efficiency) without characterizing
the complete joint probability distributions.
"""

from ._version import __version__
from .bounds import (
    BoundReport,
    CorrelationStats,
    DetectorGeometry,
    discrete_steering_check,
    fano_bound,
    fano_steering_lhs,
    modified_fano_bound,
    secret_key_rate,
    steering_certificate,
    steering_rhs,
)
from .entropy import (
    JointDistribution,
    ProbabilityVector,
    binary_entropy,
    conditional_entropy,
    differential_entropy_upper_estimate,
    gaussian_differential_entropy,
    geometric_entropy_bound,
    joint_entropy,
    marginal_a,
    marginal_b,
    mutual_information,
    shannon_entropy,
)
from .harness import (
    RunConfig,
    RunRecord,
    cmd_certify,
    cmd_contour,
    cmd_hedge,
    cmd_keyrate,
    cmd_simulate,
    load_contour,
    load_joint,
    main,
    save_contour,
    save_joint,
)
from .spdc_sim import (
    BiphotonModel,
    CountMatrix,
    apply_dead_space,
    counts_to_joint,
    joint_momentum_distribution,
    joint_position_distribution,
    momentum_mode_widths,
    position_mode_widths,
    sample_counts,
    threshold_renormalize,
    truncate_to_window,
)
from .stats import (
    ContourGrid,
    GaussianFit,
    Ordering,
    agreement_best_ordering,
    agreement_identity,
    agreement_reversed,
    contour_grid,
    domain_probability_from_fit,
    effective_domain,
    hedge_min_domain,
    lhs_std,
)

__all__ = [
    "__version__",
    "BiphotonModel", "BoundReport", "ContourGrid", "CorrelationStats",
    "CountMatrix", "DetectorGeometry", "GaussianFit", "JointDistribution",
    "Ordering", "ProbabilityVector", "RunConfig", "RunRecord",
    "agreement_best_ordering", "agreement_identity", "agreement_reversed",
    "apply_dead_space", "binary_entropy", "cmd_certify", "cmd_contour",
    "cmd_hedge", "cmd_keyrate", "cmd_simulate", "conditional_entropy",
    "contour_grid", "counts_to_joint", "differential_entropy_upper_estimate",
    "discrete_steering_check", "domain_probability_from_fit",
    "effective_domain", "fano_bound", "fano_steering_lhs",
    "gaussian_differential_entropy", "geometric_entropy_bound",
    "hedge_min_domain", "joint_entropy", "joint_momentum_distribution",
    "joint_position_distribution", "lhs_std", "load_contour", "load_joint",
    "main", "marginal_a", "marginal_b", "modified_fano_bound",
    "momentum_mode_widths", "mutual_information", "position_mode_widths",
    "sample_counts", "save_contour", "save_joint", "secret_key_rate",
    "shannon_entropy", "steering_certificate", "steering_rhs",
    "threshold_renormalize", "truncate_to_window",
]
