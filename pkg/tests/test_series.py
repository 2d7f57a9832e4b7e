"""Eigenfunction-series oracle: closed forms, decay rates, probability laws."""

import math

import numpy as np
import pytest

from conftest import random_rotation

from bhk import (
    DomainError,
    SeriesAccuracyError,
    SeriesConfig,
    gauss_kernel,
    interior_lower_bound,
    series_kernel,
    series_kernel_grid,
)


def center_kernel_3d(t):
    # 3d ball at the center: only radial modes survive, zeros at k*pi,
    # eigenfunction value pi*k^2/2 squared-normalized
    total = 0.0
    for k in range(1, 200):
        term = 0.5 * math.pi * k * k * math.exp(-k * k * math.pi * math.pi * t)
        total += term
        if term < 1e-18 * total:
            break
    return total


class TestClosedForms:
    def test_center_value_3d(self):
        cfg = SeriesConfig(dimension=3)
        for t in (0.02, 0.1, 0.3):
            got = series_kernel(t, np.zeros(3), np.zeros(3), cfg)
            want = center_kernel_3d(t)
            assert got.value == pytest.approx(want, rel=1e-10)
            assert abs(got.value - want) <= 10.0 * got.err + 1e-15

    def test_lowest_mode_decay_2d(self):
        # at late times log k(t,0,0) decays at rate j_{0,1}^2; pin the
        # rate against an independent bisection on the J0 power series
        def j0(x):
            term, total, q = 1.0, 1.0, 0.25 * x * x
            for m in range(1, 60):
                term *= -q / (m * m)
                total += term
            return total

        lo, hi = 2.0, 3.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if j0(lo) * j0(mid) < 0.0:
                hi = mid
            else:
                lo = mid
        lam1 = (0.5 * (lo + hi)) ** 2

        z = np.zeros(2)
        a = series_kernel(0.7, z, z).value
        b = series_kernel(0.8, z, z).value
        assert math.log(a / b) / 0.1 == pytest.approx(lam1, rel=1e-6)


class TestStructure:
    def test_symmetry_in_arguments(self):
        x = np.array([0.35, -0.1])
        y = np.array([-0.2, 0.55])
        a = series_kernel(0.05, x, y)
        b = series_kernel(0.05, y, x)
        assert a.value == pytest.approx(b.value, rel=1e-12)

    def test_rotation_invariance(self, rng):
        for dim in (2, 3):
            q = random_rotation(rng, dim)
            x = np.zeros(dim)
            y = np.zeros(dim)
            x[0], y[0], y[-1] = 0.4, -0.1, 0.5
            cfg = SeriesConfig(dimension=dim)
            a = series_kernel(0.06, x, y, cfg)
            b = series_kernel(0.06, q @ x, q @ y, cfg)
            assert b.value == pytest.approx(a.value, rel=1e-9)

    def test_grid_matches_pointwise(self):
        x = np.array([0.3, 0.0])
        pts = np.array([[0.1, 0.2], [-0.4, 0.1], [0.0, -0.6]])
        vals, errs = series_kernel_grid(0.08, x, pts)
        for p, v, e in zip(pts, vals, errs):
            single = series_kernel(0.08, x, p)
            assert v == pytest.approx(single.value, rel=1e-10)
            assert abs(v - single.value) <= e + single.err
            assert e <= 1e-8

    def test_positivity_and_gauss_domination(self, rng):
        for _ in range(25):
            u = rng.uniform(-0.7, 0.7, size=(2, 2))
            t = float(rng.uniform(0.01, 0.3))
            r = series_kernel(t, u[0], u[1])
            assert 0.0 < r.value < gauss_kernel(t, u[0], u[1]) + r.err

    def test_interior_sandwich(self):
        x = np.array([0.3, 0.0])
        t = 0.005
        got = series_kernel(t, x, x)
        lo = interior_lower_bound(t, x, x)
        hi = gauss_kernel(t, x, x)
        assert lo - got.err <= got.value <= hi + got.err


class TestProbabilityLaws:
    def survival(self, t, x, n_r=400, n_a=256):
        # polar trapezoid/midpoint product rule over the ball
        radii = (np.arange(n_r) + 0.5) / n_r
        angles = 2.0 * math.pi * np.arange(n_a) / n_a
        pts = np.empty((n_r * n_a, 2))
        pts[:, 0] = np.repeat(radii, n_a) * np.cos(np.tile(angles, n_r))
        pts[:, 1] = np.repeat(radii, n_a) * np.sin(np.tile(angles, n_r))
        vals, _ = series_kernel_grid(t, x, pts, abs_tol=1e-10)
        w = np.repeat(radii, n_a) * (1.0 / n_r) * (2.0 * math.pi / n_a)
        return float(np.sum(vals * w))

    def test_survival_below_one_and_decreasing(self):
        x = np.array([0.3, 0.0])
        s = [self.survival(t, x) for t in (0.05, 0.1, 0.2)]
        assert all(v <= 1.0 + 1e-6 for v in s)
        assert s[0] > s[1] > s[2] > 0.0


class TestRefusal:
    def test_small_time_refused_at_small_caps(self):
        cfg = SeriesConfig(dimension=2, max_radial_modes=40, max_angular_modes=40)
        x = np.array([0.2, 0.0])
        with pytest.raises(SeriesAccuracyError):
            series_kernel(1e-6, x, x, cfg)

    def test_tiny_time_refused_fast(self):
        x = np.array([0.0, 0.1])
        with pytest.raises(SeriesAccuracyError):
            series_kernel(1e-9, x, x)

    def test_points_outside_rejected(self):
        with pytest.raises(DomainError):
            series_kernel(0.1, np.array([1.2, 0.0]), np.zeros(2))
        with pytest.raises(DomainError):
            series_kernel(0.1, np.zeros(2), np.array([0.0, 1.0]))
