"""Tests for decaying and expanding Jacobi fields."""

import math

import numpy as np
import pytest

from horocover.renorm import (
    ConstantCurvature,
    JacobiProfile,
    SamplerCurvature,
    backward_jacobi_field,
    jacobi_at_frames,
    jacobi_field,
    shooting_jacobi,
    stable_divergence,
    unstable_jacobi_field,
)


@pytest.fixture
def sampler():
    return SamplerCurvature(1.5, 0.5)


class TestConstantClosedForms:
    """Closed forms for K ≡ -1."""

    def test_closed_forms(self):
        model = ConstantCurvature()
        assert jacobi_field(model, 2.0) == math.exp(-2.0)
        assert unstable_jacobi_field(model, 2.0) == math.exp(2.0)
        assert stable_divergence(model, 5.0) == 1.0

    def test_riccati_reproduces_closed_form(self):
        """Solving with an explicit K ≡ -1 orbit gives e^-t."""
        value = jacobi_field(ConstantCurvature(), 3.0, curvature=lambda a: -1.0)
        assert value == pytest.approx(math.exp(-3.0), rel=1e-8)

    def test_negative_time(self):
        with pytest.raises(ValueError, match="t >= 0"):
            jacobi_field(ConstantCurvature(), -1.0)
        with pytest.raises(ValueError, match="t >= 0"):
            stable_divergence(ConstantCurvature(), -1.0)


class TestSamplerJacobi:
    """Comparison bounds and the shooting reference for variable curvature."""

    @pytest.mark.parametrize("t", [0.5, 1.0, 3.0, 6.0])
    def test_comparison_bounds(self, sampler, t):
        """e^(-√(-k_lo) t) <= J(t) <= e^(-√(-k_hi) t)."""
        value = jacobi_field(sampler, t)
        assert math.exp(-math.sqrt(-sampler.k_lo) * t) * 0.99 <= value <= math.exp(-math.sqrt(-sampler.k_hi) * t) * 1.01

    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_matches_shooting(self, sampler, t):
        orbit = sampler.orbit_curvature(0.0)
        assert jacobi_field(sampler, t) == pytest.approx(shooting_jacobi(orbit, t, sampler.k_hi), rel=1e-4)

    def test_stable_divergence_range(self, sampler):
        rate = stable_divergence(sampler, 2.0)
        assert math.sqrt(-sampler.k_hi) - 1e-6 <= rate <= math.sqrt(-sampler.k_lo) + 1e-6

    def test_unstable_field_grows(self, sampler):
        assert unstable_jacobi_field(sampler, 2.0) > math.exp(math.sqrt(-sampler.k_hi) * 2.0) * 0.99
        assert unstable_jacobi_field(sampler, 0.0) == pytest.approx(1.0)

    def test_shooting_rejects_nonnegative_curvature(self):
        with pytest.raises(ValueError, match="negative curvature"):
            shooting_jacobi(lambda a: 0.0, 1.0, 0.0)


class TestBackwardJacobiField:
    """Tests for the directly integrated backward field."""

    def test_constant_curvature(self):
        assert backward_jacobi_field(ConstantCurvature(), 2.0) == pytest.approx(math.exp(2.0), rel=1e-10)

    def test_zero_time(self, sampler):
        assert backward_jacobi_field(sampler, 0.0) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_inverts_forward_field(self, sampler, t):
        """J_(-t)(g_t x) = 1/J_t(x) along the same orbit."""
        orbit = sampler.orbit_curvature(0.4)
        assert backward_jacobi_field(sampler, t, orbit) * jacobi_field(sampler, t, orbit) == pytest.approx(
            1.0, abs=1e-9
        )

    def test_detects_other_orbit(self, sampler):
        """A different orbit phase breaks the inverse identity."""
        forward = jacobi_field(sampler, 1.0, sampler.orbit_curvature(0.0))
        backward = backward_jacobi_field(sampler, 1.0, sampler.orbit_curvature(math.pi))
        assert abs(forward * backward - 1.0) > 1e-3

    def test_negative_time(self, sampler):
        with pytest.raises(ValueError, match="t >= 0"):
            backward_jacobi_field(sampler, -1.0)


class TestJacobiProfile:
    """Tests for many-orbit profiles."""

    def test_profile_matches_single_orbit(self, sampler):
        phases = np.array([0.0, 1.0, 2.5])
        profile = JacobiProfile.from_model(sampler, phases, 4.0)
        values = profile(np.array([1.0, 4.0]))
        assert values.shape == (3, 2)
        for k, phase in enumerate(phases):
            single = jacobi_field(sampler, 4.0, curvature=sampler.orbit_curvature(phase))
            assert values[k, 1] == pytest.approx(single, rel=1e-6)

    def test_initial_slope_range(self, sampler):
        profile = JacobiProfile.from_model(sampler, np.linspace(0, 6, 7), 2.0, check_horizon=True)
        assert np.all(profile.initial_slope <= -math.sqrt(-sampler.k_hi) + 1e-6)
        assert np.all(profile.initial_slope >= -math.sqrt(-sampler.k_lo) - 1e-6)

    def test_outside_range(self, sampler):
        profile = JacobiProfile.from_model(sampler, [0.0], 1.0)
        with pytest.raises(ValueError, match="Profile covers"):
            profile.log_jacobi(2.0)

    def test_negative_t_max(self, sampler):
        with pytest.raises(ValueError, match="t_max"):
            JacobiProfile.from_model(sampler, [0.0], -1.0)


class TestJacobiAtFrames:
    """Tests for J_t evaluated at domain frames."""

    def test_constant(self, domain_frames, group):
        np.testing.assert_allclose(jacobi_at_frames(ConstantCurvature(), domain_frames, 1.5, group), math.exp(-1.5))

    def test_zero_time(self, sampler, domain_frames, group):
        np.testing.assert_array_equal(jacobi_at_frames(sampler, domain_frames, 0.0, group), 1.0)

    def test_backward_field_bounds(self, sampler, domain_frames, group):
        """J_(-t) >= 1 for the backward flow."""
        values = jacobi_at_frames(sampler, domain_frames[:5], -1.0, group)
        assert np.all(values >= math.exp(math.sqrt(-sampler.k_hi)) * 0.99)
        assert np.all(values <= math.exp(math.sqrt(-sampler.k_lo)) * 1.01)
