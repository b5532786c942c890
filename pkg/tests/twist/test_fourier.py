"""Tests for the twist decomposition and its reconstruction."""

import numpy as np
import pytest

from horocover.cover import CoverPoint, TwistParameter
from horocover.errors import GridTooCoarse
from horocover.geometry import IsometryMatrix
from horocover.twist import (
    TwistedSection,
    aliased_value,
    apply_twist,
    minimum_grid,
    project_twist,
    project_twist_batch,
    reconstruct,
    twist_grid,
)


@pytest.fixture
def center_point():
    return CoverPoint(IsometryMatrix.identity(), (0, 0))


class TestProjectTwist:
    """Tests for π_ω."""

    def test_zero_twist_periodizes(self, observable_d2, center_point):
        assert project_twist(observable_d2, (0.0, 0.0), center_point) == pytest.approx(1.5)

    def test_character_weights(self, observable_d2, center_point):
        assert project_twist(observable_d2, (0.25, 0.0), center_point) == pytest.approx(1.0 + 0.5j)

    def test_dimension_mismatch(self, observable, center_point):
        with pytest.raises(ValueError, match="does not match"):
            project_twist(observable, (0.1,), center_point)

    def test_batch_matches_single(self, observable_d2, domain_frames):
        decks = np.array([[k % 3 - 1, k % 2] for k in range(20)])
        omega = TwistParameter((0.3, -0.7))
        batch = project_twist_batch(observable_d2, omega, domain_frames, decks)
        for k in (0, 4, 11):
            point = CoverPoint(IsometryMatrix.from_array(domain_frames[k]), tuple(decks[k]))
            assert batch[k] == pytest.approx(project_twist(observable_d2, omega, point))

    def test_equivariance(self, observable_d2, domain_frames):
        """π_ω(f)(D⁻¹x) = E_ω(D)·π_ω(f)(x)."""
        section = TwistedSection.from_observable(observable_d2, TwistParameter((0.2, 0.45)))
        points = [CoverPoint(IsometryMatrix.from_array(f), (0, 0)) for f in domain_frames[:5]]
        shifts = [(1, 0), (0, -2), (3, 1), (-1, -1), (2, 2)]
        assert section.equivariance_residual(points, shifts) < 1e-13


class TestReconstruction:
    """Tests for recovering f from its twist components."""

    def test_grid(self):
        grid = twist_grid(2, 2)
        assert [omega.values for omega in grid] == [(0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5)]
        with pytest.raises(ValueError, match="positive"):
            twist_grid(0, 1)

    @pytest.mark.parametrize("deck,expected", [((0, 0), 1.0), ((1, 0), 0.5), ((-1, 0), 0.0), ((0, 1), 0.0)])
    def test_exact_above_grid_bound(self, observable_d2, deck, expected):
        point = CoverPoint(IsometryMatrix.identity(), deck)
        value = reconstruct(observable_d2, point, minimum_grid(observable_d2))
        assert value == pytest.approx(expected, abs=1e-14)

    def test_coarse_grid_raises(self, observable_d2, center_point):
        with pytest.raises(GridTooCoarse, match="below 2·width"):
            reconstruct(observable_d2, center_point, 2)

    def test_aliasing_matches_prediction(self, observable_d2, center_point):
        """With N = 1 every copy lands on the same class."""
        value = reconstruct(observable_d2, center_point, 1, allow_aliasing=True)
        assert value == pytest.approx(aliased_value(observable_d2, center_point, 1))
        assert value == pytest.approx(1.5)


class TestApplyTwist:
    """Tests for Ξ_ω."""

    def test_preserves_modulus(self, observable, start_point):
        twisted = apply_twist(lambda x: 2.0, TwistParameter((0.3,)))
        point = start_point.shifted([5])
        assert abs(twisted(point)) == pytest.approx(2.0)
        assert twisted(point) == pytest.approx(2.0 * np.exp(2j * np.pi * 1.5))
