"""Free-probability limits of the random CP maps and the violation bounds built on them."""

from freelimits.bounds import (
    LowPCheckReport,
    bell_pair_limit,
    bell_pair_lower_bound,
    haar_pair_limit,
    isotropic_lower_bound,
    low_p_checks,
    minimal_violating_k,
    moe_gap,
    moe_minimal_violating_k,
    moe_single_lower_bound,
    mopn_transfer_window,
    multiplicativity_verdict,
    pair_entropy_ceiling,
    quadratic_entropy_bound,
    rectified_multiplicativity_verdict,
    single_channel_upper_bound,
    two_norm_deviation_bound,
    violation_rows,
)
from freelimits.optimizer import limit_mopn, shape_inequality, shape_inequality_holds, two_level_values
from freelimits.transforms import (
    coefficient_matrix,
    f_limit,
    free_cumulants_from_spectrum,
    h_derivative,
    h_value,
    haagerup_bound,
    marchenko_pastur_cdf,
    marchenko_pastur_density,
    minimize_h,
    mp_edges,
    semicircle_cdf,
    semicircle_density,
    spectral_ks_distance,
)

__all__ = [
    "LowPCheckReport",
    "bell_pair_limit",
    "bell_pair_lower_bound",
    "coefficient_matrix",
    "f_limit",
    "free_cumulants_from_spectrum",
    "h_derivative",
    "h_value",
    "haagerup_bound",
    "haar_pair_limit",
    "isotropic_lower_bound",
    "limit_mopn",
    "low_p_checks",
    "marchenko_pastur_cdf",
    "marchenko_pastur_density",
    "minimal_violating_k",
    "minimize_h",
    "moe_gap",
    "moe_minimal_violating_k",
    "moe_single_lower_bound",
    "mopn_transfer_window",
    "mp_edges",
    "multiplicativity_verdict",
    "pair_entropy_ceiling",
    "quadratic_entropy_bound",
    "rectified_multiplicativity_verdict",
    "semicircle_cdf",
    "semicircle_density",
    "shape_inequality",
    "shape_inequality_holds",
    "single_channel_upper_bound",
    "spectral_ks_distance",
    "two_level_values",
    "two_norm_deviation_bound",
    "violation_rows",
]
