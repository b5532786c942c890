"""Tests for horocycle integrals on the cover."""

import math

import numpy as np
import pytest

from horocover.cover import CoverPoint
from horocover.errors import StepTooCoarse
from horocover.ergodic import horocycle_integral, renormalized_integral, smoothing_error_constant
from horocover.geometry import IsometryMatrix, reduce_batch
from horocover.geometry.models import horocycle_batch
from horocover.renorm import SamplerCurvature
from horocover.renorm.quadrature import gauss_legendre_nodes
from horocover.twist import ConstantObservable, SurfaceObservable

STEP = 0.05


def brute_force(f, x, T, cover):
    """Reduce every quadrature node separately."""
    nodes, weights = gauss_legendre_nodes(0.0, T, round(T / STEP))
    reduced, homology, _ = reduce_batch(x.base.as_array() @ horocycle_batch(nodes), cover.group)
    decks = x.deck_array() - cover.abelianization.project(homology)
    return float(weights @ f.evaluate(reduced, decks))


@pytest.fixture
def near_center(cover_d1):
    """A point whose horocycle crosses the bump right away."""
    return CoverPoint.at(IsometryMatrix.rotation(0.4) @ IsometryMatrix.geodesic(0.2), 1)


class TestHorocycleIntegral:
    """Tests for ∫ f∘h_s."""

    def test_constant_observable(self, start_point, cover_d1):
        result = horocycle_integral(ConstantObservable(2.0), start_point, 12.5, STEP, cover_d1, breakpoints=[3.0])
        assert result.value == pytest.approx(25.0)
        assert result.at(3.0) == (pytest.approx(6.0), 0.0)

    def test_weighted_constant(self, start_point, cover_d1):
        result = horocycle_integral(ConstantObservable(1.0), start_point, 2.0, STEP, cover_d1, weight=lambda s: s)
        assert result.value == pytest.approx(2.0)

    def test_matches_brute_force(self, near_center, cover_d1, observable):
        T = 30.0
        result = horocycle_integral(observable, near_center, T, STEP, cover_d1)
        assert result.value > 0
        assert result.value == pytest.approx(brute_force(observable, near_center, T, cover_d1), abs=1e-9)
        assert result.flagged_chunks >= 1

    def test_matches_brute_force_d2(self, near_center, cover_d2, observable_d2):
        x = CoverPoint.at(near_center.base, 2)
        T = 25.0
        result = horocycle_integral(observable_d2, x, T, STEP, cover_d2)
        assert result.value == pytest.approx(brute_force(observable_d2, x, T, cover_d2), abs=1e-9)

    def test_breakpoints_are_running_integrals(self, near_center, cover_d1, observable):
        result = horocycle_integral(observable, near_center, 20.0, STEP, cover_d1, breakpoints=[4.5, 10.0])
        alone = horocycle_integral(observable, near_center, 4.5, STEP, cover_d1)
        assert result.at(4.5)[0] == pytest.approx(alone.value, abs=1e-11)
        assert result.at(20.0)[0] == pytest.approx(result.value)
        with pytest.raises(KeyError, match="not a breakpoint"):
            result.at(7.0)

    def test_surface_observable_ignores_deck(self, near_center, cover_d1, bump):
        f = SurfaceObservable(bump)
        first = horocycle_integral(f, near_center, 15.0, STEP, cover_d1)
        second = horocycle_integral(f, near_center.shifted([9]), 15.0, STEP, cover_d1)
        assert first.value == pytest.approx(second.value, abs=1e-13)

    def test_deck_shift_moves_the_support(self, near_center, cover_d1, observable):
        """Far away copies of the start point never meet the single bump in a short orbit."""
        result = horocycle_integral(observable, near_center.shifted([50]), 10.0, STEP, cover_d1)
        assert result.value == 0.0

    def test_empty_orbit(self, start_point, cover_d1, observable):
        assert horocycle_integral(observable, start_point, 0.0, STEP, cover_d1).value == 0.0

    def test_invalid_arguments(self, start_point, cover_d1, observable):
        with pytest.raises(StepTooCoarse, match="radius / 8"):
            horocycle_integral(observable, start_point, 5.0, 0.1, cover_d1)
        with pytest.raises(ValueError, match="non-negative"):
            horocycle_integral(observable, start_point, -1.0, STEP, cover_d1)
        with pytest.raises(ValueError, match="Breakpoints"):
            horocycle_integral(observable, start_point, 5.0, STEP, cover_d1, breakpoints=[6.0])


class TestRenormalizedIdentity:
    """Tests for the change of variables along a renormalized arc."""

    @pytest.mark.parametrize("t", [1.0, 2.0])
    def test_both_sides_agree(self, near_center, cover_d1, observable, t):
        result = renormalized_integral(observable, near_center, 40.0, t, STEP, cover_d1)
        assert result.ramp == pytest.approx(math.exp(-0.1 * t))
        assert result.residual <= 10 * result.tolerance + 1e-8

    def test_rejects_sampler(self, near_center, cover_d1, observable):
        with pytest.raises(ValueError, match="constant curvature"):
            renormalized_integral(observable, near_center, 40.0, 1.0, STEP, cover_d1, SamplerCurvature(1.5, 0.5))

    def test_window_must_fit(self, near_center, cover_d1, observable):
        with pytest.raises(ValueError, match="shorter than twice"):
            renormalized_integral(observable, near_center, 2.0, 2.0, STEP, cover_d1)

    def test_smoothing_error_constant(self, near_center, cover_d1, observable):
        constant = smoothing_error_constant(observable, near_center, 40.0, 1.0, STEP, cover_d1)
        assert np.isfinite(constant)
        assert constant >= 0.0
