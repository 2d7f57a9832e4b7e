"""Exit-law density: asymptotic forms against the finite-difference oracle."""

import math

import numpy as np
import pytest

from bhk import (
    DomainError,
    gauss_kernel,
    hitting_density_approx,
    hitting_density_oracle,
)


def sphere_point(angle):
    return np.array([math.cos(angle), math.sin(angle)])


class TestTangentForm:
    def test_axis_example(self):
        # x=(0.5,0), z=(1,0), t=0.01: mid=(0.75,0), both plane distances 0.25
        x = np.array([0.5, 0.0])
        z = np.array([1.0, 0.0])
        t = 0.01
        k = gauss_kernel(t, x, z)
        want = (1.0 - math.exp(-2.0 * 0.5 * 0.25 / t)) * (2.0 * 0.25 / t) * k
        got = hitting_density_approx(t, x, z, regime="tangent")
        assert got == pytest.approx(want, rel=1e-14)
        # the auto dispatch lands on the same expansion here
        assert hitting_density_approx(t, x, z) == pytest.approx(want, rel=1e-14)

    def test_matches_oracle_near_tangent_regime(self):
        x = np.array([0.5, 0.0])
        z = np.array([1.0, 0.0])
        t = 0.01
        ref = hitting_density_oracle(t, x, z)
        got = hitting_density_approx(t, x, z)
        assert abs(got - ref.value) <= 0.05 * ref.value + 3.0 * ref.err


class TestDeltaForm:
    def test_formula(self):
        # off-axis so the two expansions genuinely differ
        x = np.array([0.3, 0.4])
        z = np.array([1.0, 0.0])
        t = 0.01
        want = (0.5 / t) * gauss_kernel(t, x, z)
        got = hitting_density_approx(t, x, z, regime="delta")
        assert got == pytest.approx(want, rel=1e-14)
        tangent = hitting_density_approx(t, x, z, regime="tangent")
        assert got != pytest.approx(tangent, rel=1e-3)


class TestOracle:
    def test_center_is_isotropic(self):
        x = np.zeros(2)
        t = 0.15
        vals = [hitting_density_oracle(t, x, sphere_point(a)).value
                for a in np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)]
        base = vals[0]
        assert base > 0.0
        for v in vals[1:]:
            assert v == pytest.approx(base, rel=1e-6)

    def test_nonnegative(self, rng):
        for _ in range(6):
            r = float(rng.uniform(0.1, 0.8))
            a = float(rng.uniform(0.0, 2.0 * math.pi))
            x = r * sphere_point(a)
            z = sphere_point(float(rng.uniform(0.0, 2.0 * math.pi)))
            t = float(rng.uniform(0.02, 0.3))
            assert hitting_density_oracle(t, x, z).value >= 0.0


class TestValidation:
    def test_z_off_sphere(self):
        with pytest.raises(DomainError):
            hitting_density_approx(0.01, np.array([0.5, 0.0]), np.array([0.9, 0.0]))
        with pytest.raises(DomainError):
            hitting_density_oracle(0.01, np.array([0.5, 0.0]), np.array([1.1, 0.0]))

    def test_unknown_regime(self):
        with pytest.raises(DomainError):
            hitting_density_approx(
                0.01, np.array([0.5, 0.0]), np.array([1.0, 0.0]), regime="bogus")
