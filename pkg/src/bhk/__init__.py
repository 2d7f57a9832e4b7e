"""Short-time boundary behavior of the Dirichlet heat kernel on the unit ball.

Closed-form boundary approximants and interior bounds (:mod:`bhk.kernels`),
independent oracles to test them against (:mod:`bhk.oracles`), and an
experiment layer that fits rates, envelope constants, and regime
thresholds (:mod:`bhk.experiments`).  ``bhk --help`` for the CLI.
"""

from .errors import (
    AccuracyError,
    DegenerateGeometryError,
    DomainError,
    NumericError,
    QuadratureAccuracyError,
    SeriesAccuracyError,
    UsageError,
)
from .geometry import (
    HalfSpace,
    chord_halfspace,
    delta_ball,
    midpoint_delta,
    rho_cap_height,
    tangent_halfspace,
    unit_direction,
)
from .kernels import (
    KernelEstimate,
    RegimeConfig,
    delta_product_approx,
    gauss_kernel,
    halfspace_kernel,
    hitting_density_approx,
    interior_lower_bound,
    kernel_eval,
    one_minus_exp_ratio_bound,
    regime_select,
    shape_factor,
    tangent_product_approx,
)
from .oracles import (
    McConfig,
    OracleResult,
    SeriesConfig,
    bessel_zero,
    ck_tail_check,
    hitting_density_oracle,
    inverse_gamma_conv_integral,
    inverse_gamma_conv_scaled,
    inverse_gamma_conv_shape,
    mc_kernel,
    series_kernel,
    series_kernel_grid,
)
from .experiments import (
    BoundSuiteReport,
    CalibrationResult,
    RateFit,
    SuiteResult,
    SweepSpec,
    calibrate_regimes,
    emit_report,
    load_report,
    run_bound_suite,
    run_rate_sweep,
    worker_count,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BoundSuiteReport",
    "CalibrationResult",
    "DegenerateGeometryError",
    "DomainError",
    "HalfSpace",
    "KernelEstimate",
    "McConfig",
    "NumericError",
    "OracleResult",
    "QuadratureAccuracyError",
    "RateFit",
    "RegimeConfig",
    "SeriesAccuracyError",
    "SeriesConfig",
    "SuiteResult",
    "SweepSpec",
    "UsageError",
    "bessel_zero",
    "calibrate_regimes",
    "chord_halfspace",
    "ck_tail_check",
    "delta_ball",
    "delta_product_approx",
    "emit_report",
    "gauss_kernel",
    "halfspace_kernel",
    "hitting_density_approx",
    "hitting_density_oracle",
    "interior_lower_bound",
    "inverse_gamma_conv_integral",
    "inverse_gamma_conv_scaled",
    "inverse_gamma_conv_shape",
    "kernel_eval",
    "load_report",
    "mc_kernel",
    "midpoint_delta",
    "one_minus_exp_ratio_bound",
    "regime_select",
    "rho_cap_height",
    "run_bound_suite",
    "run_rate_sweep",
    "series_kernel",
    "series_kernel_grid",
    "shape_factor",
    "tangent_halfspace",
    "tangent_product_approx",
    "unit_direction",
    "worker_count",
    "__version__",
]
