"""Tests for the winding covariance estimate."""

import math

import numpy as np
import pytest

from horocover.cover import ZdCover
from horocover.errors import SingularEstimate
from horocover.renorm import ConstantCurvature
from horocover.spectral import CovarianceMatrix, estimate_sigma, sample_windings


class TestCovarianceMatrix:
    """Tests for the Σ container."""

    def test_symmetrizes_and_factors(self):
        sigma = CovarianceMatrix([[2.0, 0.5], [0.5, 1.0]])
        np.testing.assert_allclose(sigma.cholesky @ sigma.cholesky.T, sigma.matrix)
        assert sigma.dimension == 2
        np.testing.assert_array_equal(np.asarray(sigma), sigma.matrix)

    def test_scalar_is_one_by_one(self):
        assert CovarianceMatrix(1.7).matrix.shape == (1, 1)

    def test_not_positive_definite(self):
        with pytest.raises(SingularEstimate, match="not positive definite"):
            CovarianceMatrix([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(SingularEstimate):
            CovarianceMatrix([[0.0]])

    def test_asymmetric(self):
        with pytest.raises(ValueError, match="not symmetric"):
            CovarianceMatrix([[1.0, 0.3], [0.1, 1.0]])

    def test_drift(self):
        sigma = CovarianceMatrix([[2.0]], samples=800, time=25.0, mean=np.array([0.75]))
        assert sigma.drift == pytest.approx(0.75 / math.sqrt(2.0 * 25.0 / 800))
        assert sigma.drift_flagged
        assert math.isnan(CovarianceMatrix([[2.0]]).drift)

    def test_frame_round_trip(self):
        sigma = CovarianceMatrix([[2.0, 0.5], [0.5, 1.0]], 1000, 20.0, np.full((2, 2), 0.01))
        frame = sigma.to_frame()
        assert list(frame.columns) == ["i", "j", "value", "standard_error", "samples", "time"]
        restored = CovarianceMatrix.from_frame(frame)
        np.testing.assert_array_equal(restored.matrix, sigma.matrix)
        assert (restored.samples, restored.time) == (1000, 20.0)


class TestSampleWindings:
    """Tests for batched winding samples."""

    def test_shape_and_determinism(self, cover_d2):
        first = sample_windings(3.0, 50, 9, cover_d2)
        second = sample_windings(3.0, 50, 9, cover_d2)
        assert first.shape == (50, 2)
        np.testing.assert_array_equal(first, second)
        assert np.all(first == np.round(first))

    def test_batches_are_prefix_stable(self, cover_d1):
        """The first batch does not depend on how many batches follow."""
        short = sample_windings(2.0, 1000, 4, cover_d1)
        long = sample_windings(2.0, 1200, 4, cover_d1)
        np.testing.assert_array_equal(long[:1000], short)

    def test_mapper_independence(self, cover_d1):
        plain = sample_windings(2.0, 1200, 4, cover_d1)
        reversed_map = sample_windings(
            2.0, 1200, 4, cover_d1, mapper=lambda fn, items: [fn(i) for i in items[::-1]][::-1]
        )
        np.testing.assert_array_equal(plain, reversed_map)

    def test_zero_time(self, cover_d1):
        assert not np.any(sample_windings(0.0, 10, 1, cover_d1))

    def test_invalid(self, cover_d1):
        with pytest.raises(ValueError, match="positive"):
            sample_windings(1.0, 0, 1, cover_d1)
        with pytest.raises(ValueError, match="non-negative"):
            sample_windings(-1.0, 10, 1, cover_d1)


class TestEstimateSigma:
    """Tests for Σ̂."""

    def test_limits(self, cover_d1):
        with pytest.raises(ValueError, match="t >= 20"):
            estimate_sigma(ConstantCurvature(), 10.0, 1000, 1, cover_d1)
        with pytest.raises(ValueError, match="n >= 1000"):
            estimate_sigma(ConstantCurvature(), 20.0, 999, 1, cover_d1)

    @pytest.mark.slow
    def test_estimate(self, cover_d2):
        sigma = estimate_sigma(ConstantCurvature(), 20.0, 1000, 3, cover_d2)
        assert sigma.samples == 1000
        assert np.all(np.diag(sigma.matrix) > 0)
        assert np.all(sigma.standard_errors > 0)
        assert np.all(sigma.standard_errors < np.abs(np.diag(sigma.matrix)).max())
        # a1 and a2 play symmetric roles in the regular octagon
        assert sigma.matrix[0, 0] == pytest.approx(sigma.matrix[1, 1], rel=0.3)

    @pytest.mark.slow
    def test_swapped_projection_rows_swap_sigma(self, cover_d2, group):
        plain = estimate_sigma(ConstantCurvature(), 20.0, 1000, 5, cover_d2)
        swapped_cover = ZdCover.from_rows(((0, 0, 1, 0), (1, 0, 0, 0)), group)
        swapped = estimate_sigma(ConstantCurvature(), 20.0, 1000, 5, swapped_cover)
        order = [1, 0]
        np.testing.assert_allclose(swapped.matrix, plain.matrix[np.ix_(order, order)], rtol=1e-12, atol=1e-12)

    @pytest.mark.slow
    def test_linear_change_of_projection(self, cover_d2, group):
        """Rows Q·P give Q·Σ̂·Qᵀ on the same samples."""
        plain = estimate_sigma(ConstantCurvature(), 20.0, 1000, 5, cover_d2)
        q = np.array([[1, 1], [0, 1]])
        mixed = ZdCover.from_rows(tuple(tuple(row) for row in q @ cover_d2.abelianization.matrix), group)
        transformed = estimate_sigma(ConstantCurvature(), 20.0, 1000, 5, mixed)
        np.testing.assert_allclose(transformed.matrix, q @ plain.matrix @ q.T, rtol=1e-12, atol=1e-12)

    @pytest.mark.slow
    def test_degenerate_projection(self, group):
        with pytest.raises(SingularEstimate, match="not positive definite"):
            estimate_sigma(ConstantCurvature(), 20.0, 1000, 2, ZdCover.from_preset("degenerate", group))
