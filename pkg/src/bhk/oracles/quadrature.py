"""Inverse-gamma convolution integrals and Chapman-Kolmogorov tail checks.

The central object is

    I(t, a, b, alpha, beta) = int_0^t s^(-alpha) (t-s)^(-beta)
                              exp(-a^2/s - b^2/(t-s)) ds ,

the convolution of two inverse-gamma-type densities.  Numerically the
whole mass hides under the factor exp(-(a+b)^2/t): completing the square
gives the exact identity

    a^2/s + b^2/(t-s) - (a+b)^2/t = (a+b)^2 (s - s*)^2 / (s (t-s) t) ,

with saddle s* = a t / (a + b), so the scaled integrand
s^(1-alpha) (t-s)^(1-beta) t^(-1) e^(-E(s)) is O(1) at the saddle and
decays double-exponentially in the logistic variable s = t/(1 + e^(-u)).
Quadrature runs in u with the saddle u* = log(a/b) as a split point.

``ck_tail_check`` evaluates both sides of the Gaussian tail bounds used
with these integrals; see its docstring for the three variants.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma as gamma_fn

from ..errors import DomainError, QuadratureAccuracyError
from ..geometry import HalfSpace, as_pair
from ..kernels import gauss_kernel, halfspace_kernel
from .base import OracleResult


def _check_params(t: float, a: float, b: float, alpha: float, beta: float) -> None:
    for name, v in (("t", t), ("a", a), ("b", b)):
        if not (v > 0.0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive and finite")
    if not (alpha >= 1.5 and beta >= 1.5):
        raise DomainError("alpha and beta must be >= 3/2")
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise DomainError("alpha and beta must be finite")


def _sigmoid(u: float) -> float:
    if u >= 0.0:
        return 1.0 / (1.0 + math.exp(-u))
    eu = math.exp(u)
    return eu / (1.0 + eu)


def inverse_gamma_conv_scaled(t: float, a: float, b: float, alpha: float,
                              beta: float, tol: float = 1e-10) -> OracleResult:
    """exp(+(a+b)^2/t) * I(t, a, b, alpha, beta), immune to underflow."""
    _check_params(t, a, b, alpha, beta)
    if not (0.0 < tol < 1.0):
        raise DomainError("tol must lie in (0, 1)")
    ab2 = (a + b) ** 2
    s_star = a * t / (a + b)
    u_star = math.log(a / b)

    def exponent(u: float) -> float:
        s = t * _sigmoid(u)
        sc = t * _sigmoid(-u)
        if s <= 0.0 or sc <= 0.0:
            return math.inf
        return ab2 * (s - s_star) ** 2 / (s * sc * t)

    def integrand(u: float) -> float:
        s = t * _sigmoid(u)
        sc = t * _sigmoid(-u)
        if s <= 0.0 or sc <= 0.0:
            return 0.0
        e = ab2 * (s - s_star) ** 2 / (s * sc * t)
        # powers stay well inside float range before e^-E wins
        logg = (1.0 - alpha) * math.log(s) + (1.0 - beta) * math.log(sc) - math.log(t)
        if logg - e > 700.0:
            raise QuadratureAccuracyError("integrand overflow; parameters too extreme")
        if logg - e < -700.0:
            return 0.0
        return math.exp(logg - e)

    # march out until the exponential weight alone is negligible
    target = 250.0 + 80.0 * (abs(alpha - 1.0) + abs(beta - 1.0))
    u_lo, step = u_star - 1.0, 1.0
    for _ in range(400):
        if exponent(u_lo) >= target:
            break
        u_lo -= step
        step *= 1.5
    u_hi, step = u_star + 1.0, 1.0
    for _ in range(400):
        if exponent(u_hi) >= target:
            break
        u_hi += step
        step *= 1.5

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, abserr = quad(integrand, u_lo, u_hi, points=[u_star],
                           limit=500, epsabs=0.0,
                           epsrel=max(min(tol / 3.0, 1e-8), 1e-13))
    if not (val > 0.0) or abserr > tol * val:
        raise QuadratureAccuracyError(
            f"inverse-gamma quadrature reached {abserr:.3g} absolute "
            f"({abserr / max(val, 1e-300):.3g} relative), needed {tol:.3g}")
    return OracleResult(val, abserr, {"saddle": u_star})


def inverse_gamma_conv_integral(t: float, a: float, b: float, alpha: float,
                                beta: float, tol: float = 1e-10) -> float:
    """I(t, a, b, alpha, beta) to relative accuracy tol.

    For (a+b)^2/t beyond ~700 the unscaled value underflows float64; use
    :func:`inverse_gamma_conv_scaled` in that range.
    """
    res = inverse_gamma_conv_scaled(t, a, b, alpha, beta, tol)
    return res.value * math.exp(-(a + b) ** 2 / t)


def inverse_gamma_conv_shape(t: float, a: float, b: float, alpha: float,
                             beta: float, scaled: bool = False) -> float:
    """Closed-form two-sided shape S for the convolution integral.

    S = e^(-(a+b)^2/t) [ ((t/a^2)^(alpha-1) + (t/b^2)^(beta-1)) / t^(alpha+beta-1)
        + (a+b)^(alpha+beta-2) / t^(alpha+beta-1) * sqrt(t) / (a^(alpha-1) b^(beta-1) sqrt(t+ab)) ]

    I/S stays in a band [1/c, c] with c depending only on (alpha, beta).
    With ``scaled=True`` the exponential prefactor is dropped (pairs with
    :func:`inverse_gamma_conv_scaled`).
    """
    _check_params(t, a, b, alpha, beta)
    bracket = (((t / a ** 2) ** (alpha - 1.0) + (t / b ** 2) ** (beta - 1.0))
               / t ** (alpha + beta - 1.0)
               + (a + b) ** (alpha + beta - 2.0) / t ** (alpha + beta - 1.0)
               * math.sqrt(t) / (a ** (alpha - 1.0) * b ** (beta - 1.0)
                                 * math.sqrt(t + a * b)))
    if scaled:
        return bracket
    return bracket * math.exp(-(a + b) ** 2 / t)


# ---------------------------------------------------------------------------
# Chapman-Kolmogorov tail checks


def _sphere_area(n: int) -> float:
    return 2.0 * math.pi ** (0.5 * n) / gamma_fn(0.5 * n)


def _radial_tail(n: int, s2: float, r: float, c: float, beta: float) -> float:
    """int_r^inf (4 pi s2)^(-n/2) e^(-u^2/4 s2) (u+c)^beta u^(n-1) du * area(S^{n-1})."""
    width = math.sqrt(4.0 * s2)
    upper = r + 45.0 * width

    def f(u: float) -> float:
        return ((4.0 * math.pi * s2) ** (-0.5 * n) * math.exp(-u * u / (4.0 * s2))
                * (u + c) ** beta * u ** (n - 1))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, abserr = quad(f, r, upper, limit=200, epsabs=1e-300, epsrel=1e-11)
    if abserr > 1e-8 * val + 1e-280:
        raise QuadratureAccuracyError(
            f"radial tail quadrature error {abserr:.3g} too large vs {val:.3g}")
    return _sphere_area(n) * val


def _polar_disk_integral(f, center: np.ndarray, r: float,
                         n_rad: int, n_ang: int) -> float:
    """Integral of f over the disk B(center, r) in the plane (n = 2)."""
    nodes, wts = np.polynomial.legendre.leggauss(n_rad)
    rad = 0.5 * r * (nodes + 1.0)
    wrad = 0.5 * r * wts * rad  # polar Jacobian
    theta = 2.0 * math.pi * np.arange(n_ang) / n_ang
    wth = 2.0 * math.pi / n_ang
    pts = (center[None, None, :]
           + rad[:, None, None] * np.stack([np.cos(theta), np.sin(theta)],
                                           axis=-1)[None, :, :])
    vals = f(pts.reshape(-1, 2)).reshape(n_rad, n_ang)
    return float(np.sum(wrad[:, None] * vals) * wth)


def ck_tail_check(t: float, alpha_split: float, r: float, x, y,
                  H: HalfSpace | None = None, beta: float = 0.0, *,
                  variant: str = "weighted",
                  c_fit: float = 1.0) -> tuple[float, float]:
    """Both sides of a Gaussian Chapman-Kolmogorov tail bound.

    All variants bound the two-step kernel mass outside the ball
    B(w0, r), w0 = (1-alpha) x + alpha y, using the exact centered-product
    identity k(at,x,z) k((1-a)t,z,y) = k(t,x,y) G_{s2}(z - w0) with
    s2 = alpha (1-alpha) t.

    variant="weighted"
        lhs = int_{H minus B(w0,r)} k k delta_H(z)^beta dz, majorized by
        the radial reduction with delta_H(z) <= |z-w0| + d_H(x) + d_H(y);
        rhs = c_fit k t^(beta/2) e^(-r^2/8 s2) (1 + (d_H(x)+d_H(y))/sqrt(t))^beta.
    variant="free"
        beta = 0, no half-space: lhs = k * Gaussian mass of {|u| > r};
        rhs = c_fit k e^(-r^2/8 s2).
    variant="survival"
        half-space kernels on both sides (n = 2 only): lhs =
        k_H(t,x,y) - int_{B(w0,r)} k_H k_H dz via the exact half-space
        semigroup identity; requires B(w0, r) inside H so the integrand
        stays smooth; rhs = c_fit k_H(t,x,y) e^(-r^2/8 s2) / (alpha (1-alpha)).

    For r = 0 the weighted/free lhs with beta = 0 is exactly k(t, x, y).
    """
    t = float(t)
    alpha = float(alpha_split)
    r = float(r)
    beta = float(beta)
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError("t must be positive and finite")
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha_split must lie in (0, 1)")
    if r < 0.0 or not math.isfinite(r):
        raise DomainError("r must be >= 0 and finite")
    if beta < 0.0:
        raise DomainError("beta must be >= 0")
    px, py = as_pair(x, y)
    n = px.size
    s2 = alpha * (1.0 - alpha) * t
    k_free = gauss_kernel(t, px, py)

    if variant == "free":
        lhs = k_free * _radial_tail(n, s2, r, 0.0, 0.0)
        rhs = c_fit * k_free * math.exp(-r * r / (8.0 * s2))
        return lhs, rhs

    if variant == "weighted":
        if H is None:
            raise DomainError("weighted variant needs a half-space H")
        dx = H.signed_distance(px)
        dy = H.signed_distance(py)
        if dx < 0.0 or dy < 0.0:
            raise DomainError("x and y must lie inside H")
        lhs = k_free * _radial_tail(n, s2, r, dx + dy, beta)
        rhs = (c_fit * k_free * t ** (0.5 * beta)
               * math.exp(-r * r / (8.0 * s2))
               * (1.0 + (dx + dy) / math.sqrt(t)) ** beta)
        return lhs, rhs

    if variant == "survival":
        if H is None:
            raise DomainError("survival variant needs a half-space H")
        if n != 2:
            raise DomainError("survival variant implemented for n = 2 only")
        dx = H.signed_distance(px)
        dy = H.signed_distance(py)
        if dx < 0.0 or dy < 0.0:
            raise DomainError("x and y must lie inside H")
        w0 = (1.0 - alpha) * px + alpha * py
        if H.signed_distance(w0) <= r:
            raise DomainError("survival variant needs B(w0, r) inside H")
        k_h = halfspace_kernel(t, px, py, H)
        if r == 0.0:
            inner = 0.0
        else:
            ta, tb = alpha * t, (1.0 - alpha) * t

            def f(zs: np.ndarray) -> np.ndarray:
                dz = H.signed_distance_many(zs)
                d2a = np.sum((zs - px[None, :]) ** 2, axis=1)
                d2b = np.sum((zs - py[None, :]) ** 2, axis=1)
                ka = ((4.0 * math.pi * ta) ** -1 * np.exp(-d2a / (4.0 * ta))
                      * -np.expm1(-np.maximum(dx * dz, 0.0) / ta))
                kb = ((4.0 * math.pi * tb) ** -1 * np.exp(-d2b / (4.0 * tb))
                      * -np.expm1(-np.maximum(dz * dy, 0.0) / tb))
                return ka * kb

            coarse = _polar_disk_integral(f, w0, r, 64, 128)
            inner = _polar_disk_integral(f, w0, r, 96, 192)
            if abs(inner - coarse) > 1e-9 * (k_h + abs(inner)) + 1e-280:
                raise QuadratureAccuracyError(
                    "survival-variant disk quadrature did not settle")
        lhs = max(k_h - inner, 0.0)
        rhs = (c_fit * k_h * math.exp(-r * r / (8.0 * s2))
               / (alpha * (1.0 - alpha)))
        return lhs, rhs

    raise DomainError(f"unknown variant {variant!r}")
