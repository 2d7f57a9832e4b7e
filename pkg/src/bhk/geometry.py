"""Geometry of the unit ball: boundary distances, tangent and chord planes.

All functions are dimension-generic (n >= 2) and pure.  Points are plain
float64 vectors; half-spaces are stored as a unit inward normal plus an
offset, with signed distance  offset - <w, normal>  positive on the inside.
Degenerate requests (tangent plane at the center, chord plane of an
antipodal pair) raise instead of returning junk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, DomainError

# Closed-ball membership tolerance; radii up to 1 + BALL_ATOL are accepted
# and the boundary distance is clamped to 0 there.
BALL_ATOL = 1e-12

# Below this norm a direction is numerically meaningless.
DIRECTION_TOL = 1e-9

UNIT_NORMAL_ATOL = 1e-12


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Validate ``x`` as a finite point in dimension >= 2 and return float64."""
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise DomainError(f"expected a vector of dimension >= 2, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DomainError("point has non-finite coordinates")
    if dim is not None and p.size != dim:
        raise DomainError(f"dimension mismatch: expected {dim}, got {p.size}")
    return p


def as_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Validate two points of matching dimension."""
    px = as_point(x)
    py = as_point(y, dim=px.size)
    return px, py


def as_ball_point(x, dim: int | None = None) -> np.ndarray:
    """Like :func:`as_point` but additionally require |x| <= 1 (+ tolerance)."""
    p = as_point(x, dim=dim)
    r = float(np.linalg.norm(p))
    if r > 1.0 + BALL_ATOL:
        raise DomainError(f"point lies outside the closed unit ball (|x| = {r:.17g})")
    return p


def unit_direction(x) -> np.ndarray:
    """x / |x|, rejecting vectors too short to have a direction."""
    p = as_point(x)
    r = float(np.linalg.norm(p))
    if r < DIRECTION_TOL:
        raise DegenerateGeometryError("direction undefined this close to the origin")
    return p / r


def delta_ball(x) -> float:
    """Distance 1 - |x| from ``x`` to the unit sphere.

    Requires |x| <= 1 up to a 1e-12 slack; fuzz past the boundary is
    clamped to 0 so downstream exponentials stay in range.
    """
    p = as_ball_point(x)
    return max(0.0, 1.0 - float(np.linalg.norm(p)))


@dataclass(frozen=True)
class HalfSpace:
    """Half-space { w : <w, normal> < offset } with unit inward geometry.

    ``signed_distance`` is positive inside the half-space, negative outside,
    and equals the Euclidean distance to the bounding hyperplane.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self) -> None:
        nrm = as_point(self.normal)
        if abs(float(np.linalg.norm(nrm)) - 1.0) > UNIT_NORMAL_ATOL:
            raise DomainError("half-space normal must be a unit vector (within 1e-12)")
        if not np.isfinite(self.offset):
            raise DomainError("half-space offset must be finite")
        nrm = nrm.copy()
        nrm.flags.writeable = False
        object.__setattr__(self, "normal", nrm)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return int(self.normal.size)

    def signed_distance(self, w) -> float:
        p = as_point(w, dim=self.dim)
        return self.offset - float(p @ self.normal)

    def signed_distance_many(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized signed distance for an (m, n) array of points."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DomainError(f"expected an (m, {self.dim}) array, got {pts.shape}")
        return self.offset - pts @ self.normal

    def contains(self, w, atol: float = 0.0) -> bool:
        return self.signed_distance(w) >= -atol


def tangent_halfspace(z) -> HalfSpace:
    """Supporting half-space of the ball at the radial projection of ``z``.

    The bounding hyperplane touches the sphere at z/|z|; for ``z`` inside
    the ball, signed_distance(z) equals delta_ball(z) exactly.
    """
    return HalfSpace(unit_direction(z), 1.0)


def chord_halfspace(x, y) -> HalfSpace:
    """Half-space cut off by the chord plane through x/|x| and y/|y|.

    The plane contains both unit directions; its inward normal is the
    normalized bisector, so the offset equals cos(angle(x, y)/2).  Antipodal
    (or zero) inputs have no well-defined bisector and raise.
    """
    px, py = as_pair(x, y)
    ux = unit_direction(px)
    uy = unit_direction(py)
    bis = ux + uy
    s = float(np.linalg.norm(bis))
    if s < DIRECTION_TOL:
        raise DegenerateGeometryError("chord plane undefined for antipodal directions")
    normal = bis / s
    return HalfSpace(normal, float(ux @ normal))


def rho_cap_height(x, y) -> float:
    """Height 1 - cos(angle(x, y)/2) of the cap cut off by the chord plane.

    Computed as m / (1 + sqrt(1 - m)) with m = |x/|x| - y/|y||^2 / 4, which
    is exact in exact arithmetic and avoids cancellation for small angles.
    """
    px, py = as_pair(x, y)
    ux = unit_direction(px)
    uy = unit_direction(py)
    if float(np.linalg.norm(ux + uy)) < DIRECTION_TOL:
        raise DegenerateGeometryError("cap height undefined for antipodal directions")
    m = float(np.sum((ux - uy) ** 2)) / 4.0
    m = min(m, 1.0)
    return m / (1.0 + np.sqrt(1.0 - m))


def midpoint_delta(x, y) -> float:
    """delta_ball of the Euclidean midpoint (x + y) / 2."""
    px = as_ball_point(x)
    py = as_ball_point(y, dim=px.size)
    return delta_ball(0.5 * (px + py))
