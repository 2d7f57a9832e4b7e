"""Convolution integral: closed forms, the shape band, and tail checks.

The alpha = beta = 3/2 case is the one-sided stable(1/2) convolution and
has the exact value sqrt(pi) (a+b)/(ab) t^(-3/2) e^(-(a+b)^2/t).  The
alpha = beta = 2 regression value below was computed with mpmath.quad at
30 digits on the raw s-integrand, split at the saddle s* = at/(a+b); the
same mpmath route reproduces the 3/2 closed form to 20 digits.
"""

import math

import numpy as np
import pytest

from bhk import (
    DomainError,
    HalfSpace,
    ck_tail_check,
    gauss_kernel,
    inverse_gamma_conv_integral,
    inverse_gamma_conv_scaled,
    inverse_gamma_conv_shape,
)


def stable_closed_form(t, a, b):
    return (math.sqrt(math.pi) * (a + b) / (a * b)
            * t ** -1.5 * math.exp(-((a + b) ** 2) / t))


class TestIntegral:
    def test_stable_convolution_closed_form(self):
        for t, a, b in [(1.0, 1.0, 1.0), (1.0, 0.8, 0.5),
                        (0.3, 0.4, 0.9), (2.5, 0.2, 1.7)]:
            got = inverse_gamma_conv_integral(t, a, b, 1.5, 1.5)
            assert got == pytest.approx(stable_closed_form(t, a, b), rel=2e-10)

    def test_unit_arguments_value(self):
        # at t = a = b = 1 the closed form collapses to 2 sqrt(pi) e^-4
        got = inverse_gamma_conv_integral(1.0, 1.0, 1.0, 1.5, 1.5)
        assert got == pytest.approx(2.0 * math.sqrt(math.pi) * math.exp(-4.0),
                                    rel=1e-10)

    def test_alpha_beta_two_regression(self):
        got = inverse_gamma_conv_integral(1.0, 0.8, 0.5, 2.0, 2.0, tol=1e-12)
        assert got == pytest.approx(2.5034875211821269699, rel=1e-9)

    def test_argument_exchange_symmetry(self):
        a1 = inverse_gamma_conv_integral(0.7, 0.9, 0.3, 1.6, 2.4)
        a2 = inverse_gamma_conv_integral(0.7, 0.3, 0.9, 2.4, 1.6)
        assert a1 == pytest.approx(a2, rel=1e-10)

    def test_scaled_consistency(self):
        t, a, b, al, be = 0.9, 0.6, 0.7, 1.7, 2.2
        plain = inverse_gamma_conv_integral(t, a, b, al, be)
        scaled = inverse_gamma_conv_scaled(t, a, b, al, be)
        assert plain == pytest.approx(
            scaled.value * math.exp(-((a + b) ** 2) / t), rel=1e-10)

    def test_deep_tail_scaled(self):
        # (a+b)^2/t = 2000: the unscaled value underflows to zero, the
        # scaled one still matches the closed form
        t, a, b = 0.002, 1.0, 1.0
        assert inverse_gamma_conv_integral(t, a, b, 1.5, 1.5) == 0.0
        scaled = inverse_gamma_conv_scaled(t, a, b, 1.5, 1.5)
        want = math.sqrt(math.pi) * (a + b) / (a * b) * t ** -1.5
        assert scaled.value == pytest.approx(want, rel=1e-8)

    def test_bad_arguments(self):
        for t, a, b in [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)]:
            with pytest.raises(DomainError):
                inverse_gamma_conv_integral(t, a, b, 1.5, 1.5)


class TestShapeBand:
    def test_shape_symmetry(self):
        s1 = inverse_gamma_conv_shape(0.7, 0.9, 0.3, 1.6, 2.4)
        s2 = inverse_gamma_conv_shape(0.7, 0.3, 0.9, 2.4, 1.6)
        assert s1 == pytest.approx(s2, rel=1e-12)

    def test_scaled_pairing(self):
        t, a, b = 0.4, 0.5, 0.8
        plain = inverse_gamma_conv_shape(t, a, b, 2.0, 1.6)
        scaled = inverse_gamma_conv_shape(t, a, b, 2.0, 1.6, scaled=True)
        assert plain == pytest.approx(
            scaled * math.exp(-((a + b) ** 2) / t), rel=1e-12)

    def test_band_on_small_grid(self):
        for al in (1.6, 2.0, 3.0):
            for be in (1.6, 2.0, 3.0):
                for t, a, b in [(1.0, 1.0, 1.0), (0.2, 0.3, 1.1),
                                (3.0, 0.15, 0.4)]:
                    val = inverse_gamma_conv_scaled(t, a, b, al, be).value
                    shp = inverse_gamma_conv_shape(t, a, b, al, be, scaled=True)
                    assert 1.0 / 20.0 <= val / shp <= 20.0


class TestCkTail:
    def setup_method(self):
        self.x = np.array([0.1, 0.2])
        self.y = np.array([0.4, 0.2])
        self.H = HalfSpace(np.array([1.0, 0.0]), 1.0)

    def test_free_r_zero_is_kernel(self):
        lhs, rhs = ck_tail_check(0.2, 0.5, 0.0, self.x, self.y, variant="free")
        k = gauss_kernel(0.2, self.x, self.y)
        assert lhs == pytest.approx(k, rel=1e-13)
        assert rhs == pytest.approx(k, rel=1e-13)

    def test_weighted_r_zero_beta_zero_is_kernel(self):
        lhs, _ = ck_tail_check(0.2, 0.4, 0.0, self.x, self.y, self.H,
                               beta=0.0, variant="weighted")
        assert lhs == pytest.approx(gauss_kernel(0.2, self.x, self.y), rel=1e-10)

    def test_free_bound_holds_with_unit_constant(self):
        # true tail mass decays at rate r^2/4s2, the bound only claims
        # r^2/8s2, so c_fit = 1 dominates for every r
        for r in (0.1, 0.3, 0.7, 1.5):
            for al in (0.3, 0.5, 0.8):
                lhs, rhs = ck_tail_check(0.15, al, r, self.x, self.y,
                                         variant="free")
                assert lhs <= rhs * (1.0 + 1e-12)

    def test_lhs_decreasing_in_r(self):
        vals = [ck_tail_check(0.1, 0.5, r, self.x, self.y, self.H,
                              beta=1.0, variant="weighted")[0]
                for r in (0.05, 0.2, 0.5, 1.0)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_survival_example_within_bound(self):
        lhs, rhs = ck_tail_check(0.1, 0.5, 0.3, self.x, self.y, self.H,
                                 variant="survival")
        assert 0.0 < lhs <= rhs

    def test_survival_contracts(self):
        with pytest.raises(DomainError):
            ck_tail_check(0.1, 0.5, 5.0, self.x, self.y, self.H,
                          variant="survival")
        with pytest.raises(DomainError):
            ck_tail_check(0.1, 0.5, 0.3, self.x, self.y, variant="survival")

    def test_bad_split_and_variant(self):
        with pytest.raises(DomainError):
            ck_tail_check(0.1, 1.5, 0.3, self.x, self.y, variant="free")
        with pytest.raises(DomainError):
            ck_tail_check(0.1, 0.5, 0.3, self.x, self.y, variant="bogus")
