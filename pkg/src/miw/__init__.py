"""Ground-state configuration of N coupled worlds and its normal limit.

The package solves the strictly decreasing zero-mean configuration
driven by the recursion x_{n+1} = x_n - 1/(x_1 + ... + x_n), then
quantifies how close its empirical distribution is to standard normal:
exact Kolmogorov and Wasserstein distances, a zero-bias coupling with
checkable identities, Stein-equation functionals with verified
envelopes, and a battery of proved location/partial-sum inequalities
evaluated with explicit margins.
"""

from .checks import REL_SLACK, BoundCheck, make_check
from .gaussians import (
    SQRT_2PI,
    mills_ratio,
    mills_ratio_gap_bound,
    mills_ratio_product_bound,
    norm_cdf,
    norm_cdf_integral,
    norm_pdf,
    norm_quantile,
    norm_sf,
    norm_sf_integral,
)
from .ground_state import (
    BracketError,
    Configuration,
    Residuals,
    SolverError,
    forward_shoot,
    solve,
    variance_check,
)
from .metrics import DistanceReport, kolmogorov, report, signed_cdf_area, wasserstein
from .coupling import (
    ZeroBiasCoupling,
    build,
    density_at,
    expected_coupling_gap,
    sawtooth_expectation,
    sawtooth_value,
    w_of_omega,
    zero_bias_identity_check,
)
from .stein import (
    GridSpec,
    SawtoothConstantReport,
    SawtoothGradient,
    SteinEnvelopeReport,
    estimate_sawtooth_constant,
    sawtooth_gradient_by_quadrature,
    stein_g_indicator,
    stein_g_sawtooth,
    verify_indicator_envelope,
)
from .bounds import (
    BOUND_FAMILIES,
    SweepResult,
    check_configuration_bounds,
    check_distance_bounds,
    estimate_wasserstein_constant,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BOUND_FAMILIES",
    "BoundCheck",
    "BracketError",
    "Configuration",
    "DistanceReport",
    "GridSpec",
    "REL_SLACK",
    "Residuals",
    "SawtoothConstantReport",
    "SawtoothGradient",
    "SolverError",
    "SteinEnvelopeReport",
    "SweepResult",
    "ZeroBiasCoupling",
    "SQRT_2PI",
    "build",
    "check_configuration_bounds",
    "check_distance_bounds",
    "density_at",
    "estimate_sawtooth_constant",
    "estimate_wasserstein_constant",
    "expected_coupling_gap",
    "forward_shoot",
    "kolmogorov",
    "make_check",
    "mills_ratio",
    "mills_ratio_gap_bound",
    "mills_ratio_product_bound",
    "norm_cdf",
    "norm_cdf_integral",
    "norm_pdf",
    "norm_quantile",
    "norm_sf",
    "norm_sf_integral",
    "report",
    "run_sweep",
    "sawtooth_expectation",
    "sawtooth_gradient_by_quadrature",
    "sawtooth_value",
    "signed_cdf_area",
    "solve",
    "stein_g_indicator",
    "stein_g_sawtooth",
    "variance_check",
    "verify_indicator_envelope",
    "w_of_omega",
    "wasserstein",
    "zero_bias_identity_check",
]
