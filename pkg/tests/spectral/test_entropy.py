"""Tests for the entropy estimate."""

import math

import pytest

from horocover.renorm import ConstantCurvature, SamplerCurvature
from horocover.spectral import estimate_entropy


class TestEstimateEntropy:
    """Tests for h_top from renormalized arcs."""

    def test_constant(self):
        estimate = estimate_entropy(ConstantCurvature(), 1)
        assert (estimate.value, estimate.standard_error, estimate.orbits) == (1.0, 0.0, 0)

    def test_invalid(self):
        model = SamplerCurvature(1.5, 0.5)
        with pytest.raises(ValueError, match="two times"):
            estimate_entropy(model, 1, times=[2.0])
        with pytest.raises(ValueError, match="two orbits"):
            estimate_entropy(model, 1, orbits=1)

    @pytest.mark.slow
    def test_sampler_between_contraction_rates(self):
        model = SamplerCurvature(1.5, 0.5)
        estimate = estimate_entropy(model, 3, orbits=3, times=(2.0, 4.0), arc_length=5.0)
        assert math.sqrt(-model.k_hi) * 0.95 <= estimate.value <= math.sqrt(-model.k_lo) * 1.05
        assert estimate.orbits == 3
