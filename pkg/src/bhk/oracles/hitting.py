"""Boundary hitting density extracted from the series oracle.

The joint exit density at (t, z), z on the unit sphere, is the inward
normal derivative of the ball kernel, obtained here as the one-sided limit

    q(t, x, z) = lim_{h -> 0} k_ball(t, x, (1-h) z) / h .

Two step sizes h and h/2 give a Richardson step killing the O(h) term;
the difference between the two quotients serves as the extrapolation
error estimate (the bias of the quotient is first order, so half the
applied correction is a conservative proxy for what remains).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from ..geometry import as_ball_point, as_pair
from .base import OracleResult
from .series import SeriesConfig, series_kernel

_SPHERE_ATOL = 1e-10


def hitting_density_oracle(t: float, x, z, h: float = 0.005,
                           cfg: SeriesConfig | None = None) -> OracleResult:
    """Series-difference estimate of the exit density at (t, z).

    ``h`` is the coarser of the two radial steps and must lie in (0, 0.01].
    err combines the series truncation bounds (amplified by 1/h) with the
    Richardson remainder proxy.
    """
    t = float(t)
    h = float(h)
    if not (0.0 < h <= 0.01):
        raise DomainError("step h must lie in (0, 0.01]")
    px, pz = as_pair(x, z)
    pz = as_ball_point(pz)
    if abs(1.0 - float(np.linalg.norm(pz))) > _SPHERE_ATOL:
        raise DomainError("z must lie on the unit sphere")
    cfg = cfg or SeriesConfig(dimension=px.size)

    r_coarse = series_kernel(t, px, (1.0 - h) * pz, cfg)
    r_fine = series_kernel(t, px, (1.0 - 0.5 * h) * pz, cfg)
    f_coarse = r_coarse.value / h
    f_fine = r_fine.value / (0.5 * h)
    value = 2.0 * f_fine - f_coarse
    series_err = (r_coarse.err + 4.0 * r_fine.err) / h
    extrap_err = 0.5 * abs(f_fine - f_coarse)
    work = {"terms": r_coarse.work.get("terms", 0) + r_fine.work.get("terms", 0)}
    return OracleResult(value, series_err + extrap_err, work)
