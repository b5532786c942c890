"""Tests for curvature models."""

import math

import numpy as np
import pytest

from horocover.renorm import ConstantCurvature, SamplerCurvature, build_curvature_model


class TestConstantCurvature:
    """Tests for K ≡ -1."""

    def test_bounds(self):
        model = ConstantCurvature()
        assert model.is_constant
        assert (model.k_lo, model.k_hi, model.h_top, model.contraction_rate) == (-1.0, -1.0, 1.0, 1.0)

    def test_curvature_broadcasts(self):
        values = ConstantCurvature().curvature(np.linspace(0, 1, 5), np.zeros((3, 1)))
        assert values.shape == (3, 5)
        assert np.all(values == -1.0)


class TestSamplerCurvature:
    """Tests for the sinusoidal sampler."""

    def test_range(self):
        model = SamplerCurvature(2.5, 1.5)
        assert model.k_lo == -4.0
        assert model.k_hi == -1.0
        assert model.contraction_rate == 1.0

    def test_curvature_stays_in_range(self):
        model = SamplerCurvature(1.5, 0.5, frequency=2.0)
        values = model.curvature(np.linspace(0, 20, 401), np.array([[0.0], [1.3]]))
        assert np.all(values >= model.k_lo - 1e-15)
        assert np.all(values <= model.k_hi + 1e-15)

    def test_orbit_curvature_matches_vectorized(self):
        model = SamplerCurvature(1.5, 0.5)
        orbit = model.orbit_curvature(0.7)
        assert orbit(2.0) == pytest.approx(float(model.curvature(2.0, 0.7)))

    def test_entropy_default_and_override(self):
        model = SamplerCurvature(1.5, 0.5)
        assert model.h_top == pytest.approx(math.sqrt(1.0))
        assert model.with_entropy(1.2).h_top == 1.2
        assert model.with_entropy(1.2).mean == model.mean

    def test_phase_of_domain_center(self):
        """The phase is 2π·center_profile, so 2π at the center."""
        model = SamplerCurvature(1.5, 0.5)
        assert model.phase(np.eye(2)[None])[0] == pytest.approx(2.0 * math.pi)

    @pytest.mark.parametrize(
        "mean,amplitude,frequency",
        [(1.0, 1.0, 1.0), (1.0, 2.0, 1.0), (1.0, -0.1, 1.0), (1.0, 0.5, 0.0)],
    )
    def test_invalid_parameters(self, mean, amplitude, frequency):
        with pytest.raises(ValueError):
            SamplerCurvature(mean, amplitude, frequency)

    def test_invalid_entropy(self):
        with pytest.raises(ValueError, match="Entropy"):
            SamplerCurvature(1.5, 0.5, entropy=0.0)


class TestBuildCurvatureModel:
    """Tests for building models from presets and dicts."""

    def test_from_preset(self):
        assert isinstance(build_curvature_model("constant"), ConstantCurvature)
        model = build_curvature_model("sinusoidal")
        assert isinstance(model, SamplerCurvature)
        assert (model.k_lo, model.k_hi) == (-2.0, -1.0)

    def test_from_dict(self):
        model = build_curvature_model({"kind": "sampler", "mean": "3", "amplitude": "1", "entropy": "1.5"})
        assert model == SamplerCurvature(3.0, 1.0, 1.0, 1.5)

    def test_unknown_preset(self):
        with pytest.raises(KeyError, match="not found"):
            build_curvature_model("hyperbolic-ish")

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="Unknown curvature kind"):
            build_curvature_model({"kind": "spherical"})
