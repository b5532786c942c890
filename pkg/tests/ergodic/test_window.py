"""Tests for the smoothing window."""

import math

import numpy as np
import pytest

from horocover.ergodic import SmoothingWindow


@pytest.fixture
def window():
    return SmoothingWindow(0.8, 5.0)


class TestSmoothingWindow:
    """Tests for ψ and ψ'."""

    def test_values(self, window):
        r = np.array([-0.1, 0.0, 0.4, 0.8, 2.5, 4.2, 5.0, 5.1])
        np.testing.assert_allclose(window(r), [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0], atol=1e-15)

    def test_midpoint_of_ramp(self, window):
        """The rise is symmetric about 3B/4."""
        assert float(window(0.6)) == pytest.approx(0.5)

    def test_monotone_rise(self, window):
        values = window(np.linspace(0.0, 0.8, 200))
        assert np.all(np.diff(values) >= -1e-15)

    def test_derivative_matches_finite_difference(self, window):
        r = np.linspace(0.05, 4.95, 97)
        h = 1e-6
        numeric = (window(r + h) - window(r - h)) / (2 * h)
        np.testing.assert_allclose(window.derivative(r), numeric, atol=1e-5)

    def test_derivative_lipschitz(self, window):
        r = np.linspace(0.0, 5.0, 20001)
        slopes = np.abs(np.diff(window.derivative(r))) / np.diff(r)
        assert slopes.max() <= window.derivative_lipschitz * (1 + 1e-9)
        assert window.derivative_lipschitz == pytest.approx((4 / 0.8) ** 2)

    def test_for_time(self):
        window = SmoothingWindow.for_time(3.0, 10.0, delta=0.3)
        assert window.ramp == pytest.approx(math.exp(-0.3))

    def test_invalid(self):
        with pytest.raises(ValueError, match="positive"):
            SmoothingWindow(0.0, 1.0)
        with pytest.raises(ValueError, match="shorter than twice"):
            SmoothingWindow(1.0, 1.5)
