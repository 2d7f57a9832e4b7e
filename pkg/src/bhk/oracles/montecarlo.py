"""Killed-Brownian-motion Monte Carlo oracle.

Uses the first-exit representation

    k_ball(t, x, y) = k(t, x, y) - E_x[ tau < t ; k(t - tau, W_tau, y) ]

with W a Brownian motion generated by the full Laplacian (per-coordinate
variance 2t, matching the kernel normalization used everywhere in this
package), tau the exit time from the ball, and k the free kernel.

Paths are Euler walks with steps sqrt(2 dt) * N(0, I).  Exits are detected
two ways: the segment to the proposal crosses the sphere (hard exit, the
crossing point is solved exactly), or a Brownian-bridge excursion slips
out and back between grid points.  The bridge correction uses the plane
tangent at the radial projection of the step midpoint; the one-sided
crossing probability over a step is exp(-d0 d1 / dt) for endpoint
distances d0, d1 (reflection principle with variance 2 dt).  Remaining
bias is O(dt).

The RNG is seeded per fixed-size path chunk (default_rng([seed, chunk])),
so results are bit-identical for a given (seed, n_paths) regardless of
scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..geometry import as_pair
from ..kernels import gauss_kernel
from .base import OracleResult

_CHUNK = 65536  # part of the RNG stream layout; do not change casually


@dataclass(frozen=True)
class McConfig:
    """Path count, step control, and seeding for :func:`mc_kernel`.

    dt = None means t / 2048.  bridge_correction toggles the between-step
    excursion test; switching it off roughly doubles the step bias order.
    """

    n_paths: int
    seed: int = 0
    dt: float | None = None
    bridge_correction: bool = True

    def __post_init__(self) -> None:
        if not (isinstance(self.n_paths, (int, np.integer)) and self.n_paths >= 1):
            raise DomainError("n_paths must be an integer >= 1")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise DomainError("seed must be a nonnegative integer")
        if self.dt is not None and not (0.0 < self.dt):
            raise DomainError("dt must be positive")


def _free_kernel_rows(v: np.ndarray, pts: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Free kernel k(v_i, pts_i, y), zero where v_i has been exhausted."""
    n = y.size
    ok = v > 1e-300
    vv = np.where(ok, v, 1.0)
    d2 = np.sum((pts - y[None, :]) ** 2, axis=1)
    val = (4.0 * math.pi * vv) ** (-0.5 * n) * np.exp(-d2 / (4.0 * vv))
    return np.where(ok, val, 0.0)


def mc_kernel(t: float, x, y, cfg: McConfig) -> OracleResult:
    """Monte Carlo estimate of the Dirichlet ball kernel.

    Returns value = k(t,x,y) - (mean killed contribution), err = one
    standard error of that mean.  Systematic step bias O(dt) is not
    included in err.
    """
    t = float(t)
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"time must be positive and finite, got {t!r}")
    if not isinstance(cfg, McConfig):
        raise DomainError("cfg must be a McConfig")
    px, py = as_pair(x, y)
    if float(np.linalg.norm(px)) >= 1.0 or float(np.linalg.norm(py)) >= 1.0:
        raise DomainError("mc_kernel needs points in the open ball")
    if cfg.dt is not None and cfg.dt > t:
        raise DomainError("dt must not exceed t")
    m_steps = 2048 if cfg.dt is None else max(1, int(round(t / cfg.dt)))
    dt = t / m_steps
    n = px.size
    root = math.sqrt(2.0 * dt)

    total = 0.0
    total_sq = 0.0
    n_exits = 0
    for chunk_idx in range(0, (cfg.n_paths + _CHUNK - 1) // _CHUNK):
        nc = min(_CHUNK, cfg.n_paths - chunk_idx * _CHUNK)
        rng = np.random.default_rng([int(cfg.seed), chunk_idx])
        w = np.tile(px, (nc, 1))
        for step in range(m_steps):
            if w.shape[0] == 0:
                break
            prop = w + root * rng.standard_normal(w.shape)
            r2 = np.sum(prop * prop, axis=1)
            hard = r2 >= 1.0

            exited = hard.copy()
            exit_pts = np.empty_like(w)
            exit_tau = np.empty(w.shape[0])
            if np.any(hard):
                d = prop[hard] - w[hard]
                a = np.sum(d * d, axis=1)
                b = 2.0 * np.sum(w[hard] * d, axis=1)
                c = np.sum(w[hard] * w[hard], axis=1) - 1.0
                disc = np.sqrt(np.maximum(b * b - 4.0 * a * c, 0.0))
                s = (-b + disc) / (2.0 * a)
                s = np.clip(s, 0.0, 1.0)
                exit_pts[hard] = w[hard] + s[:, None] * d
                exit_tau[hard] = (step + s) * dt

            if cfg.bridge_correction:
                u01 = rng.random(w.shape[0])
                inside = ~hard
                if np.any(inside):
                    mid = 0.5 * (w[inside] + prop[inside])
                    rm = np.linalg.norm(mid, axis=1)
                    good = rm > 1e-9
                    mhat = mid / np.maximum(rm, 1e-9)[:, None]
                    d0 = 1.0 - np.sum(w[inside] * mhat, axis=1)
                    d1 = 1.0 - np.sum(prop[inside] * mhat, axis=1)
                    p = np.where(
                        good,
                        np.exp(-np.maximum(d0, 0.0) * np.maximum(d1, 0.0) / dt),
                        0.0)
                    soft = u01[inside] < p
                    if np.any(soft):
                        idx = np.flatnonzero(inside)[soft]
                        exited[idx] = True
                        exit_pts[idx] = mhat[soft]
                        exit_tau[idx] = (step + 0.5) * dt

            if np.any(exited):
                contrib = _free_kernel_rows(t - exit_tau[exited],
                                            exit_pts[exited], py)
                total += float(np.sum(contrib))
                total_sq += float(np.sum(contrib * contrib))
                n_exits += int(np.count_nonzero(exited))
                keep = ~exited
                w = prop[keep]
            else:
                w = prop

    n_paths = cfg.n_paths
    mean = total / n_paths
    var = max(total_sq - total * total / n_paths, 0.0) / max(n_paths - 1, 1)
    stderr = math.sqrt(var / n_paths)
    value = gauss_kernel(t, px, py) - mean
    return OracleResult(value, stderr,
                        {"paths": n_paths, "steps": m_steps, "exits": n_exits})
