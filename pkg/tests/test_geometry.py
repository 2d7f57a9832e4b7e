"""Half-space constructions and the midpoint-distance inequalities."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bhk import (
    DegenerateGeometryError,
    DomainError,
    chord_halfspace,
    delta_ball,
    midpoint_delta,
    rho_cap_height,
    tangent_halfspace,
    unit_direction,
)

from conftest import random_rotation


def ball_point(draw_radius, draw_angle, dim=2):
    # radius in (0,1), direction from an angle pair; keeps hypothesis shrinkable
    r = draw_radius
    if dim == 2:
        return r * np.array([math.cos(draw_angle), math.sin(draw_angle)])
    phi = draw_angle
    return r * np.array([math.cos(phi), math.sin(phi) * 0.6, math.sin(phi) * 0.8])


radii = st.floats(min_value=1e-6, max_value=1.0 - 1e-9, exclude_max=True)
angles = st.floats(min_value=0.0, max_value=2.0 * math.pi)
dims = st.sampled_from([2, 3])


class TestTangentHalfspace:
    def test_distance_to_own_plane_equals_ball_distance(self):
        for z in (np.array([0.5, 0.0]), np.array([0.3, -0.7]),
                  np.array([0.2, 0.1, 0.6])):
            H = tangent_halfspace(z)
            assert abs(H.signed_distance(z) - delta_ball(z)) < 1e-12

    def test_plane_outside_ball(self, rng):
        # delta_B(w) <= delta_{H_z}(w) for w in the ball
        for _ in range(200):
            dim = int(rng.integers(2, 4))
            z = rng.normal(size=dim)
            z *= rng.uniform(0.05, 0.95) / np.linalg.norm(z)
            w = rng.normal(size=dim)
            w *= rng.uniform(0.0, 0.999) / np.linalg.norm(w)
            assert delta_ball(w) <= tangent_halfspace(z).signed_distance(w) + 1e-12

    def test_center_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            tangent_halfspace(np.zeros(2))


class TestChordHalfspace:
    def test_coincident_points_reduce_to_tangent_plane(self):
        H = chord_halfspace(np.array([0.5, 0.0]), np.array([0.5, 0.0]))
        assert np.allclose(H.normal, [1.0, 0.0], atol=1e-14)
        assert abs(H.offset - 1.0) < 1e-14

    def test_perpendicular_directions(self):
        r = 0.35
        H = chord_halfspace(np.array([r, 0.0]), np.array([0.0, r]))
        assert np.allclose(H.normal, [math.sqrt(0.5)] * 2, atol=1e-14)
        assert abs(H.offset - math.sqrt(0.5)) < 1e-14

    def test_unit_points_on_plane_and_inside(self, rng):
        for _ in range(200):
            dim = int(rng.integers(2, 4))
            x = rng.normal(size=dim)
            x *= rng.uniform(0.1, 0.99) / np.linalg.norm(x)
            y = rng.normal(size=dim)
            y *= rng.uniform(0.1, 0.99) / np.linalg.norm(y)
            if np.linalg.norm(unit_direction(x) + unit_direction(y)) < 1e-6:
                continue
            H = chord_halfspace(x, y)
            assert abs(H.signed_distance(unit_direction(x))) < 1e-12
            assert abs(H.signed_distance(unit_direction(y))) < 1e-12
            assert H.signed_distance(x) >= -1e-12
            assert H.signed_distance(y) >= -1e-12

    def test_chord_distance_is_cosine_scaled_ball_distance(self, rng):
        # signed dist to H_{xy} at x equals delta(x) * cos(angle(x,y)/2)
        for _ in range(300):
            dim = int(rng.integers(2, 4))
            x = rng.normal(size=dim)
            x *= rng.uniform(0.1, 0.999) / np.linalg.norm(x)
            y = rng.normal(size=dim)
            y *= rng.uniform(0.1, 0.999) / np.linalg.norm(y)
            cos_th = float(np.clip(unit_direction(x) @ unit_direction(y), -1, 1))
            if cos_th < -0.999:
                continue
            half = math.cos(0.5 * math.acos(cos_th))
            got = chord_halfspace(x, y).signed_distance(x)
            assert abs(got - delta_ball(x) * half) < 1e-10

    def test_antipodal_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            chord_halfspace(np.array([0.5, 0.0]), np.array([-0.5, 0.0]))
        with pytest.raises(DegenerateGeometryError):
            chord_halfspace(np.zeros(2), np.array([0.5, 0.0]))


class TestRhoCapHeight:
    def test_coincident_zero(self):
        assert rho_cap_height(np.array([0.3, 0.1]), np.array([0.3, 0.1])) == 0.0

    def test_perpendicular_value(self):
        got = rho_cap_height(np.array([0.7, 0.0]), np.array([0.0, 0.2]))
        assert abs(got - (1.0 - math.sqrt(0.5))) < 1e-14

    def test_is_max_cap_depth(self, rng):
        # rho equals the deepest point of the ball cap cut off by the chord
        # plane; probe with points along -normal from the sphere
        for _ in range(50):
            x = rng.normal(size=2) * 0.8
            y = rng.normal(size=2) * 0.8
            if np.linalg.norm(unit_direction(x) + unit_direction(y)) < 1e-3:
                continue
            H = chord_halfspace(x, y)
            rho = rho_cap_height(x, y)
            # the cap's deepest point is the sphere point along +normal
            deepest = -H.signed_distance(H.normal)
            assert rho >= -1e-14
            assert abs(rho - max(deepest, 0.0)) < 1e-12

    def test_cap_bound_against_midpoint(self, rng):
        for _ in range(500):
            dim = int(rng.integers(2, 4))
            x = rng.normal(size=dim)
            x *= rng.uniform(0.05, 0.999) / np.linalg.norm(x)
            y = rng.normal(size=dim)
            y *= rng.uniform(0.05, 0.999) / np.linalg.norm(y)
            if np.linalg.norm(unit_direction(x) + unit_direction(y)) < 1e-6:
                continue
            assert rho_cap_height(x, y) <= 6.0 * midpoint_delta(x, y) + 1e-12

    def test_ball_distance_within_cap_of_plane_distance(self, rng):
        # delta_B(w) <= signed_dist_{H_xy}(w) + rho(x,y) for w in the ball
        for _ in range(300):
            x = rng.normal(size=2) * 0.7
            y = rng.normal(size=2) * 0.7
            if min(np.linalg.norm(x), np.linalg.norm(y)) < 1e-3:
                continue
            if np.linalg.norm(unit_direction(x) + unit_direction(y)) < 1e-3:
                continue
            H = chord_halfspace(x, y)
            rho = rho_cap_height(x, y)
            w = rng.normal(size=2)
            w *= rng.uniform(0.0, 0.999) / np.linalg.norm(w)
            assert delta_ball(w) <= H.signed_distance(w) + rho + 1e-12


class TestMidpointChain:
    def test_center_midpoint(self):
        assert midpoint_delta(np.array([0.5, 0.0]), np.array([-0.5, 0.0])) == 1.0

    def test_coincident(self):
        assert abs(midpoint_delta(np.array([0.8, 0.0]), np.array([0.8, 0.0])) - 0.2) < 1e-15

    def test_outside_ball_rejected(self):
        with pytest.raises(DomainError):
            midpoint_delta(np.array([1.5, 0.0]), np.array([0.0, 0.0]))

    @given(radii, radii, angles, angles, dims)
    def test_lower_chain_holds_everywhere(self, rx, ry, a1, a2, dim):
        x = ball_point(rx, a1, dim)
        y = ball_point(ry, a2, dim)
        chain = (np.sum((x - y) ** 2) / 8.0
                 + delta_ball(x) / 4.0 + delta_ball(y) / 4.0)
        assert midpoint_delta(x, y) >= chain - 1e-12

    @given(radii, radii, angles, angles, dims)
    def test_factor_two_holds_on_hypothesis_region(self, rx, ry, a1, a2, dim):
        x = ball_point(rx, a1, dim)
        y = ball_point(ry, a2, dim)
        dmid = midpoint_delta(x, y)
        if 0.5 * (delta_ball(x) + delta_ball(y)) + dmid > 1.0:
            return  # outside the region where the factor-2 side holds
        chain = (np.sum((x - y) ** 2) / 8.0
                 + delta_ball(x) / 4.0 + delta_ball(y) / 4.0)
        assert dmid <= 2.0 * chain + 1e-12

    def test_factor_two_fails_without_the_region(self):
        # a through-the-center pair: chain = 0.375 < delta(mid)/2 = 0.5,
        # which is why the factor-2 check is restricted
        x, y = np.array([0.5, 0.0]), np.array([-0.5, 0.0])
        chain = (np.sum((x - y) ** 2) / 8.0
                 + delta_ball(x) / 4.0 + delta_ball(y) / 4.0)
        assert midpoint_delta(x, y) > 2.0 * chain

    @given(radii, radii, angles, angles, dims)
    def test_unit_chord_bound(self, rx, ry, a1, a2, dim):
        x = ball_point(rx, a1, dim)
        y = ball_point(ry, a2, dim)
        gap = np.linalg.norm(unit_direction(x) - unit_direction(y))
        assert gap <= 2.0 * math.sqrt(6.0) * math.sqrt(midpoint_delta(x, y)) + 1e-12


class TestRotationInvariance:
    def test_all_scalars_rotation_invariant(self, rng):
        for dim in (2, 3):
            for _ in range(40):
                q = random_rotation(rng, dim)
                x = rng.normal(size=dim)
                x *= rng.uniform(0.1, 0.99) / np.linalg.norm(x)
                y = rng.normal(size=dim)
                y *= rng.uniform(0.1, 0.99) / np.linalg.norm(y)
                if np.linalg.norm(unit_direction(x) + unit_direction(y)) < 1e-3:
                    continue
                for fn in (midpoint_delta, rho_cap_height):
                    assert abs(fn(q @ x, q @ y) - fn(x, y)) < 1e-10
