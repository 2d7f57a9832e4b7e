"""Independent oracles: eigenfunction series, Monte Carlo, hitting density,
and the inverse-gamma convolution quadrature."""

from .base import OracleResult
from .bessel import bessel_zero, zero_table
from .hitting import hitting_density_oracle
from .montecarlo import McConfig, mc_kernel
from .quadrature import (
    ck_tail_check,
    inverse_gamma_conv_integral,
    inverse_gamma_conv_scaled,
    inverse_gamma_conv_shape,
)
from .series import (
    SeriesConfig,
    series_kernel,
    series_kernel_grid,
    verify_radial_normalization,
)

__all__ = [
    "OracleResult",
    "bessel_zero",
    "zero_table",
    "hitting_density_oracle",
    "McConfig",
    "mc_kernel",
    "ck_tail_check",
    "inverse_gamma_conv_integral",
    "inverse_gamma_conv_scaled",
    "inverse_gamma_conv_shape",
    "SeriesConfig",
    "series_kernel",
    "series_kernel_grid",
    "verify_radial_normalization",
]
