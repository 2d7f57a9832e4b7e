"""Closed-form kernels, approximants, bounds, and the regime dispatcher."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bhk import (
    DomainError,
    RegimeConfig,
    delta_ball,
    delta_product_approx,
    gauss_kernel,
    halfspace_kernel,
    interior_lower_bound,
    kernel_eval,
    one_minus_exp_ratio_bound,
    regime_select,
    series_kernel,
    shape_factor,
    tangent_halfspace,
    tangent_product_approx,
)

from conftest import random_rotation

radii = st.floats(min_value=1e-4, max_value=0.999)
angles = st.floats(min_value=0.0, max_value=2.0 * math.pi)
times = st.floats(min_value=1e-4, max_value=2.0)


def pt(r, a):
    return r * np.array([math.cos(a), math.sin(a)])


class TestGaussKernel:
    def test_unit_prefactor(self):
        t = 1.0 / (4.0 * math.pi)
        assert gauss_kernel(t, np.zeros(2), np.zeros(2)) == pytest.approx(1.0, rel=1e-15)

    def test_center_to_boundary(self):
        got = gauss_kernel(0.25, np.zeros(2), np.array([1.0, 0.0]))
        assert got == pytest.approx(math.exp(-1.0) / math.pi, rel=1e-15)

    def test_nonpositive_time(self):
        with pytest.raises(DomainError):
            gauss_kernel(0.0, np.zeros(2), np.zeros(2))
        with pytest.raises(DomainError):
            gauss_kernel(-1.0, np.zeros(2), np.zeros(2))

    @given(times, radii, radii, angles, angles)
    def test_symmetry(self, t, rx, ry, a1, a2):
        x, y = pt(rx, a1), pt(ry, a2)
        assert gauss_kernel(t, x, y) == gauss_kernel(t, y, x)


class TestHalfspaceKernel:
    def test_boundary_point_kills(self):
        H = tangent_halfspace(np.array([1.0, 0.0]))
        assert halfspace_kernel(0.1, np.array([1.0, 0.0]), np.array([0.5, 0.0]), H) == 0.0

    def test_example_value(self):
        H = tangent_halfspace(np.array([0.5, 0.0]))
        x = np.array([0.5, 0.0])
        got = halfspace_kernel(0.25, x, x, H)
        assert got == pytest.approx((1.0 - math.exp(-1.0)) / math.pi, rel=1e-14)

    def test_outside_halfspace_rejected(self):
        H = tangent_halfspace(np.array([0.5, 0.0]))
        with pytest.raises(DomainError):
            halfspace_kernel(0.1, np.array([1.5, 0.0]), np.array([0.0, 0.0]), H)

    @given(times, radii, radii, angles, angles)
    def test_comparable_to_min_form(self, t, rx, ry, a1, a2):
        # k_H / ((1 ^ dd/t) k) lies in [1 - 1/e, 1]
        x, y = pt(rx, a1), pt(ry, a2)
        H = tangent_halfspace(x)
        dd = H.signed_distance(x) * H.signed_distance(y)
        if dd <= 0.0:
            return
        kh = halfspace_kernel(t, x, y, H)
        ref = min(1.0, dd / t) * gauss_kernel(t, x, y)
        if ref == 0.0:
            return
        ratio = kh / ref
        assert (1.0 - math.exp(-1.0)) - 1e-12 <= ratio <= 1.0 + 1e-12


class TestTangentProduct:
    def test_boundary_vanishes(self):
        x = np.array([1.0, 0.0])
        y = np.array([0.5, 0.0])
        assert tangent_product_approx(0.01, x, y).value == 0.0

    def test_example_value(self):
        x = np.array([0.5, 0.0])
        est = tangent_product_approx(0.1, x, x)
        want = (1.0 - math.exp(-5.0)) ** 2 / (0.4 * math.pi)
        assert est.value == pytest.approx(want, rel=1e-14)
        assert est.error_indicator == pytest.approx(math.sqrt(math.sqrt(0.1) / 0.5), rel=1e-14)

    def test_center_rejected(self):
        with pytest.raises(DomainError):
            tangent_product_approx(0.1, np.zeros(2), np.array([0.5, 0.0]))

    @given(times, radii, radii, angles, angles)
    def test_domination_chain(self, t, rx, ry, a1, a2):
        # 0 <= tangent product <= halfspace product bound <= gauss
        x, y = pt(rx, a1), pt(ry, a2)
        v = tangent_product_approx(t, x, y).value
        k = gauss_kernel(t, x, y)
        Hx, Hy = tangent_halfspace(x), tangent_halfspace(y)
        mid = 0.5 * (x + y)
        prod = 1.0
        for H, z in ((Hx, x), (Hy, y)):
            u = 2.0 * H.signed_distance(z) * H.signed_distance(mid) / t
            prod *= -math.expm1(-max(u, 0.0))
        assert 0.0 <= v <= prod * k * (1 + 1e-12) <= k * (1 + 1e-12)

    @given(times, radii, radii, angles, angles)
    def test_symmetry(self, t, rx, ry, a1, a2):
        x, y = pt(rx, a1), pt(ry, a2)
        a = tangent_product_approx(t, x, y).value
        b = tangent_product_approx(t, y, x).value
        assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


class TestDeltaProduct:
    def test_boundary_vanishes(self):
        x = np.array([1.0, 0.0])
        assert delta_product_approx(0.01, x, x).value == 0.0

    def test_linear_variant_example(self):
        x = np.array([0.99, 0.0])
        y = 0.99 * np.array([math.cos(0.01), math.sin(0.01)])
        est = delta_product_approx(0.01, x, y, exponential=False)
        want = delta_ball(x) * delta_ball(y) / 0.01 * gauss_kernel(0.01, x, y)
        assert est.value == pytest.approx(want, rel=1e-14)

    def test_rate_expression(self):
        x = np.array([0.99, 0.0])
        est = delta_product_approx(0.01, x, x)
        want = math.sqrt(0.01) + math.sqrt(0.01 / math.sqrt(0.01))
        assert est.error_indicator == pytest.approx(want, rel=1e-13)

    @given(times, radii, radii, angles, angles)
    def test_variant_gap(self, t, rx, ry, a1, a2):
        # |linear - exponential| <= (dd/t)^2/2 * k
        x, y = pt(rx, a1), pt(ry, a2)
        lin = delta_product_approx(t, x, y, exponential=False).value
        expo = delta_product_approx(t, x, y, exponential=True).value
        u = delta_ball(x) * delta_ball(y) / t
        assert abs(lin - expo) <= 0.5 * u * u * gauss_kernel(t, x, y) + 1e-300


class TestInteriorLowerBound:
    def test_center_example(self):
        k = gauss_kernel(0.1, np.zeros(2), np.zeros(2))
        corr = math.exp(-10.0) * (2.0 + 4.0 * 10.0)
        got = interior_lower_bound(0.1, np.zeros(2), np.zeros(2))
        assert got == pytest.approx((1.0 - corr) * k, rel=1e-13)

    def test_limit_is_gauss(self):
        x = np.zeros(2)
        t = 1e-6
        assert interior_lower_bound(t, x, x) == pytest.approx(
            gauss_kernel(t, x, x), rel=1e-15)

    def test_clamped_at_zero(self):
        # deep in the boundary regime the correction exceeds 1
        x = np.array([0.999, 0.0])
        assert interior_lower_bound(0.5, x, x) == 0.0

    def test_below_series_oracle(self):
        # the sandwich at a benign interior point
        x = np.array([0.3, 0.0])
        res = series_kernel(0.005, x, x)
        low = interior_lower_bound(0.005, x, x)
        assert low - res.err <= res.value <= gauss_kernel(0.005, x, x) + res.err


class TestShapeFactor:
    def test_diagonal_form(self):
        x = np.array([0.9, 0.0])
        assert shape_factor(0.001, x, x) == pytest.approx(
            min(1.0, 0.1 * 0.1 / 0.001), rel=1e-14)
        assert shape_factor(0.5, x, x) == pytest.approx(0.1 * 0.1 / 0.5, rel=1e-14)

    def test_two_point_example(self):
        x = np.array([0.9, 0.0])
        y = np.array([0.9, 0.1])
        dx, dy = delta_ball(x), delta_ball(y)
        s2 = float(np.sum((x - y) ** 2))
        want = (min(1.0, dx * dy / 0.001)
                + min(1.0, dx * s2 / 0.001) * min(1.0, dy * s2 / 0.001))
        assert shape_factor(0.001, x, y) == pytest.approx(want, rel=1e-14)
        assert 1.9 < want < 2.0  # near the saturated value 2

    @given(times, radii, radii, angles, angles)
    def test_range(self, t, rx, ry, a1, a2):
        h = shape_factor(t, pt(rx, a1), pt(ry, a2))
        assert 0.0 <= h <= 2.0


class TestExpRatio:
    def test_equal_arguments(self):
        lhs, scale = one_minus_exp_ratio_bound(1.3, 1.3, 0.1)
        assert lhs == 0.0 and scale == 0.0

    def test_example_value(self):
        lhs, scale = one_minus_exp_ratio_bound(2.0, 1.0, 0.1)
        # (1-e^-2)/(1-e^-1) - 1 = e^-1 exactly
        assert lhs == pytest.approx(math.exp(-1.0), rel=1e-14)
        assert scale == pytest.approx(1.0, rel=1e-15)

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            one_minus_exp_ratio_bound(-1.0, 1.0, 0.1)
        with pytest.raises(DomainError):
            one_minus_exp_ratio_bound(0.05, 1.0, 0.1)  # u/v <= c1

    def test_sup_finite_on_grid(self):
        grid = np.exp(np.linspace(math.log(1e-6), math.log(50.0), 60))
        sup = 0.0
        for u in grid:
            for v in grid:
                if u == v or u / v <= 0.1:
                    continue
                lhs, scale = one_minus_exp_ratio_bound(float(u), float(v), 0.1)
                sup = max(sup, lhs / scale)
        assert math.isfinite(sup)
        assert sup < 20.0


class TestRegimeSelect:
    def test_interior_center(self):
        assert regime_select(0.01, np.zeros(2), np.zeros(2)) == "interior"

    def test_delta_regime_near_boundary(self):
        x = np.array([0.999, 0.0])
        assert regime_select(0.01, x, x) == "thm2-boundary"

    def test_tangent_regime_separated_pair(self):
        # min delta 0.2, midpoint radius ~0.68, t tuned so that
        # rho^2/t <= 10 < (delta(mid)/sqrt(t))^2
        r, s = 0.8, 0.85
        x = np.array([r, 0.0])
        c = (2.0 * r * r - s * s) / (2.0 * r * r)
        y = r * np.array([c, math.sqrt(max(1.0 - c * c, 0.0))])
        t = 0.0041
        assert abs(np.linalg.norm(x - y) - s) < 1e-12
        assert regime_select(t, x, y) == "thm1-boundary"

    def test_fallback_gap(self):
        x = np.array([0.9, 0.0])
        assert regime_select(0.04, x, x) == "oracle-fallback"

    def test_threshold_validation(self):
        with pytest.raises(DomainError):
            RegimeConfig(tangent_threshold=0.1, ratio_threshold=0.2)
        with pytest.raises(DomainError):
            RegimeConfig(time_threshold=0.0)


class TestKernelEval:
    def test_interior_sandwiched(self):
        x = np.array([0.2, 0.1])
        est = kernel_eval(0.01, x, x)
        assert est.regime == "interior"
        assert interior_lower_bound(0.01, x, x) <= est.value <= gauss_kernel(0.01, x, x)

    def test_tangent_regime_dispatch(self):
        r, s = 0.8, 0.85
        x = np.array([r, 0.0])
        c = (2.0 * r * r - s * s) / (2.0 * r * r)
        y = r * np.array([c, math.sqrt(max(1.0 - c * c, 0.0))])
        est = kernel_eval(0.0041, x, y)
        assert est.regime == "thm1-boundary"
        assert est.value == tangent_product_approx(0.0041, x, y).value

    def test_fallback_is_series(self):
        x = np.array([0.9, 0.0])
        est = kernel_eval(0.04, x, x)
        res = series_kernel(0.04, x, x)
        assert est.regime == "oracle-fallback"
        assert abs(est.value - res.value) <= res.err


class TestRotationInvariance:
    def test_all_kernels(self, rng):
        for dim in (2, 3):
            for _ in range(25):
                q = random_rotation(rng, dim)
                x = rng.normal(size=dim)
                x *= rng.uniform(0.1, 0.99) / np.linalg.norm(x)
                y = rng.normal(size=dim)
                y *= rng.uniform(0.1, 0.99) / np.linalg.norm(y)
                t = float(rng.uniform(0.001, 0.5))
                for fn in (gauss_kernel, interior_lower_bound, shape_factor):
                    a, b = fn(t, x, y), fn(t, q @ x, q @ y)
                    assert a == pytest.approx(b, rel=1e-10, abs=1e-280)
                a = tangent_product_approx(t, x, y).value
                b = tangent_product_approx(t, q @ x, q @ y).value
                assert a == pytest.approx(b, rel=1e-10, abs=1e-280)
