"""Tables of Bessel-function zeros for the spectral decomposition.

Low orders (nu below 10) are generated row by row over nu = base, base+1,
... using the interlacing property j_{nu,k} < j_{nu+1,k} < j_{nu,k+1}:
each zero of the next order is bracketed by two consecutive zeros of the
previous one (plus a sign test on the tail interval), then pinned by
bisection and polished with Newton steps on J_nu.  The first row comes
from McMahon's expansion; for half-integer base 0.5 the zeros are exactly
k*pi.

Higher orders skip the bracketing: the first-order uniform asymptotic
j_{nu,k} ~ nu z(nu^(-2/3) a_k), with a_k the k-th negative Airy zero and
z the inverse of sqrt(z^2-1) - acos(1/z), lands within a small fraction
of the zero spacing for every k once nu >= 10, and a few clipped Newton
iterations (run flattened over the whole block) finish the job.  Each
row is still checked against interlacing with its predecessor, which
pins every entry to the correct (nu, k); rows that fail fall back to the
bracketed path.

Tables are cached per fractional base order, grown geometrically on
demand, and safe to share across threads.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import ai_zeros, jv, jvp

from ..errors import DomainError, NumericError

# Hard ceiling on table size; 0.125 * JMAX_CAP^2 zeros ~ 10^7 entries.
JMAX_CAP = 9000.0

# Orders below this use the bracketed row-by-row construction.
_OLVER_MIN_NU = 10.0

_LOCK = threading.Lock()
_TABLES: dict[float, "ZeroTable"] = {}
_AIRY: np.ndarray = np.empty(0)


@dataclass
class ZeroTable:
    """Zeros of J_{base+m} (rows[m]) below jmax, plus flattened mode arrays.

    flat_j / flat_order / flat_invnorm are all modes sorted by zero value;
    flat_invnorm[i] = 1 / |J_{order+1}(zero)| is the radial normalizer.
    """

    base: float
    jmax: float
    rows: list
    norms: list
    flat_j: np.ndarray
    flat_order: np.ndarray
    flat_invnorm: np.ndarray


def _mcmahon(nu: float, k) -> np.ndarray:
    """McMahon's large-k expansion of j_{nu,k}; error ~ 2e-3 already at k=1."""
    beta = (np.asarray(k, dtype=float) + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    return (beta
            - (mu - 1.0) / (8.0 * beta)
            - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta) ** 3))


def _first_zero_estimate(nu: float) -> float:
    # large-order asymptotics; crude but only used to size tables
    return nu + 1.8557571 * nu ** (1.0 / 3.0) + 1.033150 * nu ** (-1.0 / 3.0) if nu > 1 else 2.5


def _count_below(nu: float, jmax: float) -> int:
    """Phase-integral count of zeros of J_nu in (0, jmax], good to O(1).

    McMahon's linear count jmax/pi - nu/2 undercounts badly once nu is
    comparable to jmax; the turning-point integral does not.
    """
    if jmax <= nu:
        return 1
    return max(int((math.sqrt(jmax * jmax - nu * nu)
                    - nu * math.acos(nu / jmax)) / math.pi + 0.75), 1)


def _newton(nu: float, x: np.ndarray, lo: np.ndarray | None = None,
            hi: np.ndarray | None = None, iters: int = 6) -> np.ndarray:
    x = np.array(x, dtype=float)
    for _ in range(iters):
        f = jv(nu, x)
        fp = jvp(nu, x)
        step = np.where(fp != 0.0, f / np.where(fp != 0.0, fp, 1.0), 0.0)
        x = x - step
        if lo is not None:
            # clip back into the bracket; keeps stray steps from jumping rows
            x = np.minimum(np.maximum(x, lo + 1e-15), hi - 1e-15)
        if np.max(np.abs(step)) < 1e-13 * max(1.0, float(np.max(x))):
            break
    return x


def _bisect_refine(nu: float, lo: np.ndarray, hi: np.ndarray, n_bis: int) -> tuple[np.ndarray, np.ndarray]:
    flo = jv(nu, lo)
    for _ in range(n_bis):
        mid = 0.5 * (lo + hi)
        fm = jv(nu, mid)
        take_left = flo * fm <= 0.0
        hi = np.where(take_left, mid, hi)
        lo = np.where(take_left, lo, mid)
        flo = np.where(take_left, flo, fm)
    return lo, hi


def _validate_row(nu: float, zeros: np.ndarray) -> None:
    if zeros.size == 0:
        return
    if np.any(np.diff(zeros) <= 0.0):
        raise NumericError(f"zero row for nu={nu} not strictly increasing")
    resid = np.abs(jv(nu, zeros) / jvp(nu, zeros))
    if float(np.max(resid)) > 1e-10 * max(1.0, float(zeros[-1])):
        raise NumericError(f"zero row for nu={nu} failed residual check")


def _first_row(base: float, jmax: float) -> np.ndarray:
    if abs(base - 0.5) < 1e-15:
        n = int(jmax / math.pi)
        guesses = math.pi * np.arange(1, n + 1)
    else:
        n = max(1, int(jmax / math.pi) + 2)
        guesses = _mcmahon(base, np.arange(1, n + 1))
    zeros = _newton(base, guesses, iters=8)
    zeros = zeros[zeros <= jmax]
    _validate_row(base, zeros)
    return zeros


def _next_row(nu_next: float, prev: np.ndarray, jmax: float) -> np.ndarray:
    brackets_lo = []
    brackets_hi = []
    if prev.size >= 2:
        brackets_lo.append(prev[:-1])
        brackets_hi.append(prev[1:])
    # tail interval (last zero of the previous order, jmax]: zero present
    # iff the sign changes
    if prev.size >= 1 and prev[-1] < jmax:
        a, b = float(prev[-1]), float(jmax)
        if jv(nu_next, a) * jv(nu_next, b) < 0.0:
            brackets_lo.append(np.array([a]))
            brackets_hi.append(np.array([b]))
    if not brackets_lo:
        return np.empty(0)
    lo = np.concatenate(brackets_lo)
    hi = np.concatenate(brackets_hi)
    lo, hi = _bisect_refine(nu_next, lo, hi, 10)
    zeros = _newton(nu_next, 0.5 * (lo + hi), lo=lo, hi=hi)
    # safeguard: fall back to pure bisection where Newton stalled
    resid = np.abs(jv(nu_next, zeros))
    scale = np.abs(jvp(nu_next, zeros)) * (hi - lo)
    bad = resid > 1e-9 * np.maximum(scale, 1e-30)
    if np.any(bad):
        blo, bhi = _bisect_refine(nu_next, lo[bad], hi[bad], 50)
        zeros = zeros.copy()
        zeros[bad] = 0.5 * (blo + bhi)
    _validate_row(nu_next, zeros)
    return zeros[zeros <= jmax]


def _airy_neg_zeros(count: int) -> np.ndarray:
    global _AIRY
    if _AIRY.size < count:
        _AIRY = ai_zeros(max(count, 2 * _AIRY.size, 64))[0]
    return _AIRY[:count]


def _olver_z(w: np.ndarray) -> np.ndarray:
    """Solve sqrt(z^2 - 1) - acos(1/z) = w for z >= 1, elementwise."""
    w = np.asarray(w, dtype=float)
    # expansions of the inverse near z = 1 and z -> inf seed the iteration
    z = np.where(w > 1.7, w + 0.5 * math.pi,
                 1.0 + (1.5 * w) ** (2.0 / 3.0) / 2.0 ** (1.0 / 3.0))
    for _ in range(12):
        s = np.sqrt(np.maximum(z * z - 1.0, 1e-300))
        g = s - np.arccos(1.0 / z)
        z = np.maximum(z - (g - w) * z / s, 1.0 + 1e-12)
    return z


def _polish_flat(nu: np.ndarray, x0: np.ndarray,
                 iters: int = 7) -> tuple[np.ndarray, np.ndarray]:
    """Clipped Newton on J_nu for a flat batch of (nu, guess) pairs.

    Steps are capped below half the zero spacing so a guess cannot drift
    to a neighboring zero.  Returns (zeros, converged mask).
    """
    x = np.array(x0, dtype=float)
    done = np.zeros(x.size, dtype=bool)
    active = np.arange(x.size)
    for _ in range(iters):
        if active.size == 0:
            break
        xa = x[active]
        na = nu[active]
        f = jv(na, xa)
        fp = jv(na - 1.0, xa) - (na / xa) * f
        step = np.where(fp != 0.0, f / np.where(fp != 0.0, fp, 1.0), 0.0)
        step = np.clip(step, -1.4, 1.4)
        xa = xa - step
        x[active] = xa
        settled = np.abs(step) <= 1e-13 * np.maximum(xa, 1.0)
        done[active[settled]] = True
        active = active[~settled]
    return x, done


def _interlaced(prev: np.ndarray, row: np.ndarray) -> bool:
    if row.size == 0:
        return True
    if prev.size < row.size:
        return False
    if np.any(row <= prev[:row.size]):
        return False
    hi = prev[1:row.size + 1]
    return not np.any(row[:hi.size] >= hi)


def _olver_rows(base: float, m_start: int, jmax: float,
                prev: np.ndarray) -> list:
    nus = []
    sizes = []
    m = m_start
    while True:
        nu = base + m
        if nu >= jmax or _first_zero_estimate(nu) > jmax + 2.0:
            break
        sizes.append(_count_below(nu, jmax) + 3)
        nus.append(nu)
        m += 1
    if not nus:
        return []
    a = -_airy_neg_zeros(max(sizes))
    nu_flat = np.repeat(np.asarray(nus), sizes)
    k_idx = np.concatenate([np.arange(s) for s in sizes])
    w = (2.0 / 3.0) * a[k_idx] ** 1.5 / nu_flat
    x, ok = _polish_flat(nu_flat, nu_flat * _olver_z(w))

    out = []
    off = 0
    for nu, s in zip(nus, sizes):
        full = x[off:off + s]
        row_ok = bool(np.all(ok[off:off + s]))
        off += s
        # the last polished zero must overshoot jmax, else the row may be
        # missing zeros below jmax and the series tail bound would lie
        complete = full.size > 0 and float(full[-1]) > jmax
        row = full[full <= jmax]
        if not (row_ok and complete and np.all(np.diff(row) > 0.0)
                and _interlaced(prev, row)):
            row = _next_row(nu, prev, jmax)
        out.append(row)
        prev = row
        if row.size == 0:
            break
    return out


def _build_table(base: float, jmax: float) -> ZeroTable:
    rows = [_first_row(base, jmax)]
    if rows[0].size == 0:
        raise NumericError(f"no zeros of J_{base} below {jmax}; table too small")
    m = 0
    while (rows[-1].size > 0 and base + m + 1 < jmax
           and base + m + 1 < _OLVER_MIN_NU):
        m += 1
        rows.append(_next_row(base + m, rows[-1], jmax))
    if rows[-1].size > 0 and base + m + 1 < jmax:
        rows.extend(_olver_rows(base, m + 1, jmax, rows[-1]))
    while rows and rows[-1].size == 0:
        rows.pop()
    norms = [np.abs(jv(base + i + 1.0, r)) for i, r in enumerate(rows)]
    for i, nr in enumerate(norms):
        if nr.size and float(np.min(nr)) <= 0.0:
            raise NumericError(f"vanishing normalizer in row {i}")
    flat_j = np.concatenate(rows)
    flat_order = np.concatenate([np.full(r.size, i, dtype=np.int64)
                                 for i, r in enumerate(rows)])
    flat_invnorm = 1.0 / np.concatenate(norms)
    order = np.argsort(flat_j, kind="stable")
    return ZeroTable(base, float(jmax), rows, norms,
                     flat_j[order], flat_order[order], flat_invnorm[order])


def zero_table(base: float, jmax: float) -> ZeroTable:
    """Cached table of all zeros of J_{base+m}, m >= 0, up to jmax."""
    if not (0.0 <= base < 1.0):
        raise DomainError("base order must lie in [0, 1)")
    if jmax > JMAX_CAP:
        raise NumericError(
            f"requested zero table up to {jmax:.3g} exceeds the cap {JMAX_CAP:.3g}")
    with _LOCK:
        tbl = _TABLES.get(base)
        if tbl is None or tbl.jmax < jmax:
            build_to = min(max(1.2 * jmax, 30.0), JMAX_CAP)
            tbl = _build_table(base, build_to)
            _TABLES[base] = tbl
        return tbl


def bessel_zero(nu: float, k: int) -> float:
    """k-th positive zero of J_nu, accurate to ~1e-12 relative.

    nu >= 0 may be fractional; k counts from 1.
    """
    nu = float(nu)
    if not (nu >= 0.0 and math.isfinite(nu)):
        raise DomainError("order nu must be >= 0 and finite")
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise DomainError("index k must be an integer >= 1")
    base = nu - math.floor(nu)
    m = int(math.floor(nu))
    need = max(float(_mcmahon(nu, np.array([k + 2.0]))[0]),
               _first_zero_estimate(nu) + (k + 2) * math.pi)
    for _ in range(8):
        tbl = zero_table(base, need)
        if m < len(tbl.rows) and tbl.rows[m].size >= k:
            return float(tbl.rows[m][k - 1])
        if need >= JMAX_CAP:
            break
        need = min(need * 1.5, JMAX_CAP)
    raise NumericError(f"could not bracket zero j_({nu},{k}) below {JMAX_CAP}")
