"""Eigenfunction-series oracle for the Dirichlet heat kernel of the ball.

The kernel is summed over the spectral decomposition

    k_ball(t, x, y) = sum_{l,k} e^(-j^2 t) R_{l,k}(|x|) R_{l,k}(|y|) Z_l(cos g)

with j = j_{nu_l, k} the k-th zero of J_{nu_l}, nu_l = l + n/2 - 1, g the
angle between x and y.  Radial parts are L^2-normalized on the ball,

    n=2:  R = sqrt(2) J_l(j r) / |J_{l+1}(j)|,        Z_0 = 1/2pi, Z_l = cos(l g)/pi
    n=3:  R = sqrt(2) sqrt(2 j / pi) j_l(j r) / |J_{l+3/2}(j)|,
          Z_l = (2l+1)/(4pi) P_l(cos g)

(the n=3 radial part is written through the spherical Bessel function
j_l, which is regular at r = 0).

Truncation is by a spectral cutoff: all modes with zero <= J are summed,
and the discarded remainder is bounded by peeling off e^(-(1-1/m) j^2 t)
and applying Cauchy-Schwarz against the diagonal at time t/m,

    sum_{j > J} e^(-j^2 t) |phi phi| <= e^(-(1-1/m) J^2 t) (4 pi t / m)^(-n/2),

with m = 8 (larger m sharpens the exponent but inflates the prefactor;
m = 8 is near the flat part of the trade-off and cuts the required
cutoff by ~25% against m = 2).  On top of that a float64 cancellation
floor of 1e-13 * sum|terms| is folded into ``err``; the series cannot
certify values below that floor (reached once |x-y|^2/4t is beyond ~30).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_legendre, jv, spherical_jn

from ..errors import DomainError, SeriesAccuracyError
from ..geometry import as_ball_point, as_pair
from .base import OracleResult
from .bessel import JMAX_CAP, ZeroTable, _first_zero_estimate, zero_table

_FP_EPS = 1e-13     # per-unit-of-|terms| cancellation floor
_J_FLOOR = 4.5      # always include at least the lowest couple of modes


@dataclass(frozen=True)
class SeriesConfig:
    """Controls for the series oracle.

    tail_tol is a relative target for the truncation bound.  The mode caps
    bound the table size: at most max_angular_modes rows l and
    max_radial_modes zeros per row enter the sum; when the caps bind before
    tail_tol is met, err reports the (larger) achievable bound.
    """

    dimension: int = 2
    tail_tol: float = 1e-10
    max_radial_modes: int = 200
    max_angular_modes: int = 200

    def __post_init__(self) -> None:
        if self.dimension not in (2, 3):
            raise DomainError("series oracle supports dimension 2 or 3 only")
        if not (0.0 < self.tail_tol < 1.0):
            raise DomainError("tail_tol must lie in (0, 1)")
        if self.max_radial_modes < 1 or self.max_angular_modes < 1:
            raise DomainError("mode caps must be >= 1")


def _base_order(n: int) -> float:
    return 0.0 if n == 2 else 0.5


_TAIL_SPLIT = 8.0   # the m in the tail bound; exponent coefficient 1 - 1/m


def _lead(t: float, n: int) -> float:
    return (4.0 * math.pi * t / _TAIL_SPLIT) ** (-0.5 * n)


def _tail_bound(j_cut: float, t: float, n: int) -> float:
    return math.exp(-(1.0 - 1.0 / _TAIL_SPLIT) * j_cut * j_cut * t) * _lead(t, n)


def _required_cutoff(t: float, n: int, abs_target: float) -> float:
    """Smallest J whose tail bound is below abs_target."""
    lead = _lead(t, n)
    if lead <= abs_target:
        return 0.0
    return math.sqrt(math.log(lead / abs_target)
                     / ((1.0 - 1.0 / _TAIL_SPLIT) * t))


def _caps_estimate(n: int, cfg: SeriesConfig) -> float:
    # pre-table estimate of where the mode caps start excluding zeros
    base = _base_order(n)
    row_cap = _first_zero_estimate(base + cfg.max_angular_modes)
    radial_cap = (cfg.max_radial_modes + 1 + 0.5 * base - 0.25) * math.pi
    return min(row_cap, radial_cap)


def _caps_cutoff(tbl: ZeroTable, cfg: SeriesConfig) -> float:
    """Exact zero value at which the mode caps begin to exclude modes."""
    out = math.inf
    if len(tbl.rows) > cfg.max_angular_modes:
        out = float(tbl.rows[cfg.max_angular_modes][0])
    row0 = tbl.rows[0]
    if row0.size > cfg.max_radial_modes:
        # (K+1)-th zero grows with the order, so row 0 is the binding one
        out = min(out, float(row0[cfg.max_radial_modes]))
    return out


def _angle_cosine(px: np.ndarray, py: np.ndarray, rx: float, ry: float) -> float:
    if rx < 1e-14 or ry < 1e-14:
        return 1.0  # only l = 0 survives at the center; angle irrelevant
    return float(np.clip(px @ py / (rx * ry), -1.0, 1.0))


def _mode_sum(tbl: ZeroTable, count: int, t: float, n: int,
              rx: float, ry: float, cos_g: float) -> tuple[float, float]:
    j = tbl.flat_j[:count]
    l = tbl.flat_order[:count]
    inv = tbl.flat_invnorm[:count]
    w = np.exp(-(j * j) * t) * (inv * inv)
    if n == 2:
        lf = l.astype(float)
        fx = jv(lf, j * rx)
        fy = fx if ry == rx else jv(lf, j * ry)
        g = math.acos(cos_g)
        ang = np.cos(lf * g) / math.pi
        np.copyto(ang, 1.0 / (2.0 * math.pi), where=(l == 0))
        terms = (2.0 * w) * fx * fy * ang
    else:
        fx = spherical_jn(l, j * rx)
        fy = fx if ry == rx else spherical_jn(l, j * ry)
        ang = (2.0 * l + 1.0) * eval_legendre(l, cos_g)
        terms = (w * j / math.pi ** 2) * fx * fy * ang
    return float(np.sum(terms)), float(np.sum(np.abs(terms)))


def series_kernel(t: float, x, y, cfg: SeriesConfig | None = None) -> OracleResult:
    """Dirichlet ball kernel at (t, x, y) with a certified error bound.

    Both points must lie in the open ball.  ``err`` combines the analytic
    truncation bound with the cancellation floor; when err exceeds 10% of
    |value| at the configured caps, SeriesAccuracyError is raised (use the
    interior bound or a boundary approximant in that region instead).
    """
    t = float(t)
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"time must be positive and finite, got {t!r}")
    px, py = as_pair(x, y)
    cfg = cfg or SeriesConfig(dimension=px.size)
    n = cfg.dimension
    if px.size != n:
        raise DomainError(f"points have dimension {px.size}, config says {n}")
    px = as_ball_point(px)
    py = as_ball_point(py, dim=n)
    rx = float(np.linalg.norm(px))
    ry = float(np.linalg.norm(py))
    if rx >= 1.0 or ry >= 1.0:
        raise DomainError("series oracle needs points in the open ball")
    cos_g = _angle_cosine(px, py, rx, ry)
    base = _base_order(n)

    d2 = float(np.sum((px - py) ** 2))
    # free kernel dominates the Dirichlet kernel: safe first guess
    guess = (4.0 * math.pi * t) ** (-0.5 * n) * math.exp(-d2 / (4.0 * t))
    guess = max(guess, 1e-280)
    caps_est = _caps_estimate(n, cfg)

    # refuse before building any table when even the caps-limited cutoff
    # cannot certify 10% of the free-kernel ceiling
    best_tail = _tail_bound(min(caps_est, JMAX_CAP), t, n)
    if best_tail > 0.1 * guess:
        raise SeriesAccuracyError(
            f"series tail bound {best_tail:.3g} at the caps-limited cutoff "
            f"{min(caps_est, JMAX_CAP):.0f} exceeds 10% of the free-kernel "
            f"ceiling {guess:.3g}; t too small for the configured caps")

    value = 0.0
    err = math.inf
    n_terms = 0
    prev_cut = 0.0
    j_cut = 0.0
    for _ in range(12):
        abs_target = max(cfg.tail_tol * guess, 1e-280)
        j_req = max(_required_cutoff(t, n, abs_target), _J_FLOOR)
        tbl = zero_table(base, min(max(j_req, _J_FLOOR + 1.0), caps_est * 1.05, JMAX_CAP))
        j_cut = min(j_req, _caps_cutoff(tbl, cfg), tbl.jmax)
        count = int(np.searchsorted(tbl.flat_j, j_cut, side="right"))
        value, abs_sum = _mode_sum(tbl, count, t, n, rx, ry, cos_g)
        n_terms = count
        tail = _tail_bound(j_cut, t, n)
        fp = _FP_EPS * abs_sum
        err = tail + fp
        if tail <= max(cfg.tail_tol * abs(value), 0.5 * fp):
            break
        if j_cut <= prev_cut or j_cut < j_req:
            break  # caps (or the table ceiling) bind; no more modes to add
        prev_cut = j_cut
        guess = max(abs(value), fp, 1e-280)

    if err > 0.1 * abs(value):
        raise SeriesAccuracyError(
            f"series certified err {err:.3g} exceeds 10% of value {value:.3g} "
            f"at cutoff {j_cut:.1f} (caps {cfg.max_angular_modes} angular / "
            f"{cfg.max_radial_modes} radial); use the interior bound or a "
            "boundary approximant in this regime")
    return OracleResult(value, err, {"terms": n_terms, "cutoff": j_cut})


def series_kernel_grid(t: float, x, pts, cfg: SeriesConfig | None = None,
                       abs_tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Kernel values k_ball(t, x, z_i) for many targets z_i at once.

    ``pts`` is an (m, n) array of points in the closed ball (boundary rows
    just return 0 up to truncation error).  The truncation target is the
    absolute tolerance ``abs_tol`` (default: tail_tol relative to the
    tail-bound prefactor); quadrature consumers should pass the absolute
    accuracy their weights require.  Returns (values, errs).
    """
    t = float(t)
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"time must be positive and finite, got {t!r}")
    px = as_ball_point(x)
    cfg = cfg or SeriesConfig(dimension=px.size)
    n = cfg.dimension
    if px.size != n:
        raise DomainError(f"x has dimension {px.size}, config says {n}")
    zs = np.asarray(pts, dtype=float)
    if zs.ndim != 2 or zs.shape[1] != n:
        raise DomainError(f"pts must be an (m, {n}) array, got {zs.shape}")
    if not np.all(np.isfinite(zs)):
        raise DomainError("pts has non-finite entries")
    rz = np.linalg.norm(zs, axis=1)
    if float(np.max(rz, initial=0.0)) > 1.0 + 1e-12:
        raise DomainError("pts must lie in the closed unit ball")
    rx = float(np.linalg.norm(px))
    if rx >= 1.0:
        raise DomainError("x must lie in the open ball")

    if abs_tol is None:
        abs_tol = cfg.tail_tol * _lead(t, n)
    if not abs_tol > 0.0:
        raise DomainError("abs_tol must be positive")
    base = _base_order(n)
    j_req = max(_required_cutoff(t, n, abs_tol), _J_FLOOR)
    tbl = zero_table(base, min(max(j_req, _J_FLOOR + 1.0),
                               _caps_estimate(n, cfg) * 1.05, JMAX_CAP))
    j_cut = min(j_req, _caps_cutoff(tbl, cfg), tbl.jmax)
    count = int(np.searchsorted(tbl.flat_j, j_cut, side="right"))
    tail = _tail_bound(j_cut, t, n)

    j = tbl.flat_j[:count]
    l = tbl.flat_order[:count]
    inv = tbl.flat_invnorm[:count]
    w = np.exp(-(j * j) * t) * (inv * inv)
    lf = l.astype(float)
    if n == 2:
        fx = jv(lf, j * rx)
        wx = (2.0 * w) * fx / math.pi
        wx0 = np.where(l == 0, 0.5, 1.0) * wx
    else:
        fx = spherical_jn(l, j * rx)
        wx0 = (w * j / math.pi ** 2) * fx * (2.0 * l + 1.0)

    m = zs.shape[0]
    values = np.empty(m)
    errs = np.empty(m)
    # keep the (chunk x modes) work arrays near ~4e6 entries
    chunk = max(1, int(4e6 / max(count, 1)))
    safe = np.maximum(rz, 1e-300)
    cos_g = np.clip((zs @ px) / (safe * max(rx, 1e-300)), -1.0, 1.0)
    cos_g = np.where((rz < 1e-14) | (rx < 1e-14), 1.0, cos_g)
    for s in range(0, m, chunk):
        e = min(s + chunk, m)
        rad = rz[s:e, None] * j[None, :]
        if n == 2:
            fz = jv(lf[None, :], rad)
            ang = np.cos(np.arccos(cos_g[s:e])[:, None] * lf[None, :])
            terms = wx0[None, :] * fz * ang
        else:
            fz = spherical_jn(l[None, :], rad)
            ang = eval_legendre(l[None, :], cos_g[s:e, None])
            terms = wx0[None, :] * fz * ang
        values[s:e] = terms.sum(axis=1)
        errs[s:e] = tail + _FP_EPS * np.abs(terms).sum(axis=1)
    return values, errs


def verify_radial_normalization(dimension: int, n_orders: int = 3,
                                n_zeros: int = 3) -> float:
    """Max deviation of int_0^1 R_{l,k}(r)^2 r^(n-1) dr from 1.

    Gauss-Legendre with 400 nodes; exercises the first n_orders x n_zeros
    modes.  Build-time sanity check for the normalizers.
    """
    if dimension not in (2, 3):
        raise DomainError("dimension 2 or 3")
    nodes, weights = np.polynomial.legendre.leggauss(400)
    r = 0.5 * (nodes + 1.0)
    wq = 0.5 * weights
    base = _base_order(dimension)
    tbl = zero_table(base, (n_zeros + n_orders + 2) * math.pi + 10.0)
    worst = 0.0
    for l in range(n_orders):
        for k in range(n_zeros):
            j = tbl.rows[l][k]
            invn = 1.0 / tbl.norms[l][k]
            if dimension == 2:
                R = math.sqrt(2.0) * jv(float(l), j * r) * invn
            else:
                R = (math.sqrt(2.0) * math.sqrt(2.0 * j / math.pi)
                     * spherical_jn(l, j * r) * invn)
            integral = float(np.sum(wq * R * R * r ** (dimension - 1)))
            worst = max(worst, abs(integral - 1.0))
    return worst
