"""Closed-form heat kernels, boundary approximants, and regime dispatch.

Conventions used throughout the package:

* free kernel  k(t, x, y) = (4 pi t)^(-n/2) exp(-|x-y|^2 / 4t)
  (generator is the full Laplacian, so the variance per coordinate is 2t);
* delta(x) = 1 - |x| is the distance to the unit sphere;
* ``mid`` is the Euclidean midpoint (x + y) / 2.

Two boundary approximants for the Dirichlet kernel of the ball are
provided.  ``tangent_product_approx`` multiplies the free kernel by the
survival factors of the half-spaces tangent at x/|x| and y/|y|; it is
accurate when delta(mid) / sqrt(t) is large.  ``delta_product_approx``
multiplies by (1 - e^(-delta(x) delta(y) / t)) (or the linear variant
delta(x) delta(y) / t) and is accurate when t and delta(mid) / sqrt(t)
are both small.  ``interior_lower_bound`` gives the deep-interior sandwich
floor, and ``kernel_eval`` dispatches between all of these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import (
    HalfSpace,
    as_ball_point,
    as_pair,
    delta_ball,
    tangent_halfspace,
)

REGIME_INTERIOR = "interior"
REGIME_TANGENT = "thm1-boundary"
REGIME_DELTA = "thm2-boundary"
REGIME_FALLBACK = "oracle-fallback"

REGIMES = (REGIME_INTERIOR, REGIME_TANGENT, REGIME_DELTA, REGIME_FALLBACK)

# Dispatch labels for the two hitting-density expansions.
HITTING_TANGENT = "tangent"
HITTING_DELTA = "delta"

_SPHERE_ATOL = 1e-10


def one_minus_exp(w: float) -> float:
    """1 - exp(-w) with full relative accuracy down to w ~ 1e-300."""
    return -math.expm1(-w)


def _check_time(t: float) -> float:
    t = float(t)
    if not (t > 0.0) or not math.isfinite(t):
        raise DomainError(f"time must be positive and finite, got {t!r}")
    return t


@dataclass(frozen=True)
class RegimeConfig:
    """Thresholds steering :func:`regime_select`.

    tangent_threshold
        Dispatch to the tangent-product form when delta(mid)/sqrt(t) exceeds
        this.
    ratio_threshold, time_threshold
        Dispatch to the delta-product form when delta(mid)/sqrt(t) is below
        ratio_threshold and t is below time_threshold.
    interior_threshold
        Treat the pair as interior when rho^2/t exceeds this, rho being the
        smaller of the two boundary distances.

    Defaults are calibrated so each approximant keeps roughly <= 20%
    relative error at its regime edge; ``calibrate_regimes`` in the
    experiments module refits them from sweeps.
    """

    tangent_threshold: float = 5.0
    ratio_threshold: float = 0.2
    time_threshold: float = 0.05
    interior_threshold: float = 10.0

    def __post_init__(self) -> None:
        for name in ("tangent_threshold", "ratio_threshold", "time_threshold",
                     "interior_threshold"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"RegimeConfig.{name} must be positive and finite")
        if self.tangent_threshold <= self.ratio_threshold:
            raise DomainError("tangent_threshold must exceed ratio_threshold")


DEFAULT_REGIMES = RegimeConfig()


@dataclass(frozen=True)
class KernelEstimate:
    """A kernel value plus the regime that produced it.

    ``error_indicator`` is the dimensionless rate expression of the regime
    (not a certified bound): sqrt(sqrt(t)/delta(mid)) for the tangent form,
    sqrt(t) + sqrt(delta(mid)/sqrt(t)) for the delta form, the sandwich
    correction term for the interior regime, and err/|value| for oracle
    fallback.
    """

    value: float
    regime: str
    error_indicator: float

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise DomainError(f"unknown regime {self.regime!r}")
        if not (self.value >= 0.0):
            raise DomainError("kernel estimates must be nonnegative")
        if math.isnan(self.error_indicator) or self.error_indicator < 0.0:
            raise DomainError("error_indicator must be >= 0")


def gauss_kernel(t: float, x, y) -> float:
    """Free Gaussian kernel (4 pi t)^(-n/2) exp(-|x-y|^2 / 4t)."""
    t = _check_time(t)
    px, py = as_pair(x, y)
    n = px.size
    d2 = float(np.sum((px - py) ** 2))
    return (4.0 * math.pi * t) ** (-0.5 * n) * math.exp(-d2 / (4.0 * t))


def halfspace_kernel(t: float, x, y, H: HalfSpace) -> float:
    """Dirichlet kernel of the half-space H at (t, x, y).

    Both points must lie in the closure of H.  Reflection gives the exact
    factorization k_H = (1 - e^(-d_H(x) d_H(y) / t)) * k.
    """
    t = _check_time(t)
    if not isinstance(H, HalfSpace):
        raise DomainError("H must be a HalfSpace")
    dx = H.signed_distance(x)
    dy = H.signed_distance(y)
    if dx < -1e-12 or dy < -1e-12:
        raise DomainError("halfspace_kernel requires both points inside H")
    dx, dy = max(dx, 0.0), max(dy, 0.0)
    return one_minus_exp(dx * dy / t) * gauss_kernel(t, x, y)


def tangent_product_approx(t: float, x, y) -> KernelEstimate:
    """Boundary approximant built from the two tangent half-spaces.

    value = (1 - e^(-2 delta(x) d_Hx(mid) / t))
          * (1 - e^(-2 delta(y) d_Hy(mid) / t)) * k(t, x, y)

    where H_x, H_y are the half-spaces tangent at x/|x|, y/|y| and ``mid``
    is the midpoint.  Symmetric in (x, y) and squeezed into [0, k].  The
    indicator sqrt(sqrt(t)/delta(mid)) is the regime's relative-error rate;
    it degrades as the midpoint approaches the sphere.
    """
    t = _check_time(t)
    px = as_ball_point(x)
    py = as_ball_point(y, dim=px.size)
    Hx = tangent_halfspace(px)
    Hy = tangent_halfspace(py)
    mid = 0.5 * (px + py)
    fx = one_minus_exp(2.0 * delta_ball(px) * max(Hx.signed_distance(mid), 0.0) / t)
    fy = one_minus_exp(2.0 * delta_ball(py) * max(Hy.signed_distance(mid), 0.0) / t)
    value = fx * fy * gauss_kernel(t, px, py)
    dmid = delta_ball(mid)
    indicator = math.inf if dmid == 0.0 else math.sqrt(math.sqrt(t) / dmid)
    return KernelEstimate(value, REGIME_TANGENT, indicator)


def delta_product_approx(t: float, x, y, exponential: bool = True) -> KernelEstimate:
    """Boundary approximant (1 - e^(-delta(x) delta(y)/t)) * k(t, x, y).

    With ``exponential=False`` the factor is the linear form
    delta(x) delta(y) / t instead; the two differ by at most
    (delta(x) delta(y)/t)^2 / 2 * k.  Indicator:
    sqrt(t) + sqrt(delta(mid)/sqrt(t)).
    """
    t = _check_time(t)
    px = as_ball_point(x)
    py = as_ball_point(y, dim=px.size)
    u = delta_ball(px) * delta_ball(py) / t
    factor = one_minus_exp(u) if exponential else u
    value = factor * gauss_kernel(t, px, py)
    dmid = delta_ball(0.5 * (px + py))
    indicator = math.sqrt(t) + math.sqrt(dmid / math.sqrt(t))
    return KernelEstimate(value, REGIME_DELTA, indicator)


def interior_correction(q: float, n: int) -> float:
    """Correction term e^(-q) * sum_{k=1..n} 2^k q^(k-1) / (k-1)!  (q = rho^2/t)."""
    if q < 0.0 or not math.isfinite(q):
        raise DomainError("q must be >= 0 and finite")
    if n < 1:
        raise DomainError("dimension must be >= 1")
    poly = 0.0
    coeff = 2.0
    for k in range(1, n + 1):
        poly += coeff * q ** (k - 1)
        coeff *= 2.0 / k
    return math.exp(-q) * poly


def interior_lower_bound(t: float, x, y) -> float:
    """Deep-interior lower bound k * (1 - correction), clamped at 0.

    rho is the smaller of the two boundary distances: the segment [x, y]
    stays at least that far from the sphere (convexity: delta is concave
    along the segment, so its minimum sits at an endpoint).  The bound is
    vacuous (0) unless rho^2/t is large.
    """
    t = _check_time(t)
    px = as_ball_point(x)
    py = as_ball_point(y, dim=px.size)
    rho = min(delta_ball(px), delta_ball(py))
    corr = interior_correction(rho * rho / t, px.size)
    return max(0.0, 1.0 - corr) * gauss_kernel(t, px, py)


def shape_factor(t: float, x, y) -> float:
    """Dimensionless two-sided shape h(t, x, y) in [0, 2].

    h = min(1, delta(x) delta(y) / t)
      + min(1, delta(x) |x-y|^2 / t) * min(1, delta(y) |x-y|^2 / t)

    The Dirichlet kernel of the ball is comparable to h * k for t up to
    order 1, with dimension-dependent constants.
    """
    t = _check_time(t)
    px = as_ball_point(x)
    py = as_ball_point(y, dim=px.size)
    dx = delta_ball(px)
    dy = delta_ball(py)
    d2 = float(np.sum((px - py) ** 2))
    return (min(1.0, dx * dy / t)
            + min(1.0, dx * d2 / t) * min(1.0, dy * d2 / t))


def hitting_density_approx(t: float, x, z, cfg: RegimeConfig | None = None,
                           regime: str | None = None) -> float:
    """Approximate joint density of (exit time, exit point) at (t, z).

    ``z`` must lie on the unit sphere (to 1e-10).  Two expansions:

    * ``"tangent"`` (delta(mid)/sqrt(t) large):
      (1 - e^(-2 delta(x) d_Hx(mid)/t)) * (2 d_Hz(mid)/t) * k(t, x, z)
    * ``"delta"`` (t and delta(mid)/sqrt(t) small):
      (delta(x)/t) * k(t, x, z)

    With ``regime=None`` the choice follows ``cfg`` thresholds; in the gap
    between them the expansion whose regime edge is nearer in log scale is
    used.
    """
    t = _check_time(t)
    cfg = cfg or DEFAULT_REGIMES
    px = as_ball_point(x)
    pz = as_ball_point(z, dim=px.size)
    if abs(1.0 - float(np.linalg.norm(pz))) > _SPHERE_ATOL:
        raise DomainError("z must lie on the unit sphere")
    mid = 0.5 * (px + pz)
    xi = delta_ball(mid) / math.sqrt(t)
    if regime is None:
        if xi > cfg.tangent_threshold:
            regime = HITTING_TANGENT
        elif t < cfg.time_threshold and xi < cfg.ratio_threshold:
            regime = HITTING_DELTA
        else:
            # gap: neither hypothesis holds, pick the nearer edge
            edge = math.sqrt(cfg.tangent_threshold * cfg.ratio_threshold)
            regime = HITTING_TANGENT if xi >= edge else HITTING_DELTA
    if regime == HITTING_TANGENT:
        Hx = tangent_halfspace(px)
        Hz = tangent_halfspace(pz)
        fx = one_minus_exp(2.0 * delta_ball(px) * max(Hx.signed_distance(mid), 0.0) / t)
        return fx * (2.0 * max(Hz.signed_distance(mid), 0.0) / t) * gauss_kernel(t, px, pz)
    if regime == HITTING_DELTA:
        return (delta_ball(px) / t) * gauss_kernel(t, px, pz)
    raise DomainError(f"unknown hitting regime {regime!r}")


def one_minus_exp_ratio_bound(u: float, v: float, c1: float) -> tuple[float, float]:
    """Pieces of the Lipschitz-type bound for w -> 1 - e^(-w).

    Returns (lhs, rhs_scale) with lhs = |(1-e^(-u))/(1-e^(-v)) - 1| and
    rhs_scale = |u-v|/v, for u, v > 0 with u/v > c1.  Harnesses fit the
    constant c0 = sup lhs/rhs_scale per c1.
    """
    u, v, c1 = float(u), float(v), float(c1)
    if not (u > 0.0 and v > 0.0 and c1 > 0.0):
        raise DomainError("u, v, c1 must all be positive")
    if not u / v > c1:
        raise DomainError(f"need u/v > c1, got u/v = {u / v:.3g} with c1 = {c1:.3g}")
    lhs = abs(one_minus_exp(u) / one_minus_exp(v) - 1.0)
    return lhs, abs(u - v) / v


def regime_select(t: float, x, y, cfg: RegimeConfig | None = None) -> str:
    """Pick the evaluation regime for (t, x, y), in fixed priority order.

    interior (rho^2/t above threshold and the sandwich correction < 1),
    then thm1-boundary (delta(mid)/sqrt(t) above tangent_threshold), then
    thm2-boundary (t below time_threshold and delta(mid)/sqrt(t) below
    ratio_threshold), else oracle-fallback.
    """
    t = _check_time(t)
    cfg = cfg or DEFAULT_REGIMES
    px = as_ball_point(x)
    py = as_ball_point(y, dim=px.size)
    rho = min(delta_ball(px), delta_ball(py))
    q = rho * rho / t
    if q > cfg.interior_threshold and interior_correction(q, px.size) < 1.0:
        return REGIME_INTERIOR
    xi = delta_ball(0.5 * (px + py)) / math.sqrt(t)
    if xi > cfg.tangent_threshold:
        return REGIME_TANGENT
    if t < cfg.time_threshold and xi < cfg.ratio_threshold:
        return REGIME_DELTA
    return REGIME_FALLBACK


def kernel_eval(t: float, x, y, cfg: RegimeConfig | None = None,
                series_cfg=None) -> KernelEstimate:
    """Evaluate the Dirichlet kernel of the ball by regime dispatch.

    Interior pairs use the free kernel (indicator = the sandwich width,
    i.e. the interior correction term); boundary regimes use the matching
    approximant; anything else falls back to the eigenfunction series
    oracle, whose certified err/|value| becomes the indicator.  The
    fallback raises SeriesAccuracyError when the series cannot certify
    10% accuracy, and DomainError for dimensions it does not support.
    """
    t = _check_time(t)
    cfg = cfg or DEFAULT_REGIMES
    px = as_ball_point(x)
    py = as_ball_point(y, dim=px.size)
    regime = regime_select(t, px, py, cfg)
    if regime == REGIME_INTERIOR:
        rho = min(delta_ball(px), delta_ball(py))
        corr = interior_correction(rho * rho / t, px.size)
        return KernelEstimate(gauss_kernel(t, px, py), REGIME_INTERIOR, corr)
    if regime == REGIME_TANGENT:
        return tangent_product_approx(t, px, py)
    if regime == REGIME_DELTA:
        return delta_product_approx(t, px, py)
    from .oracles.series import SeriesConfig, series_kernel  # deferred, heavy

    scfg = series_cfg or SeriesConfig(dimension=px.size)
    res = series_kernel(t, px, py, scfg)
    rel = res.err / abs(res.value) if res.value != 0.0 else math.inf
    return KernelEstimate(max(res.value, 0.0), REGIME_FALLBACK, rel)
