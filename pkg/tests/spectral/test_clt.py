"""Tests for the CLT diagnostic."""

import math

import numpy as np
import pytest

from horocover.renorm import ConstantCurvature
from horocover.spectral import CLTReport, clt_diagnostic, inverse_square_root, whiten


class TestWhitening:
    """Tests for Σ^(-1/2) and whitening."""

    def test_inverse_square_root(self):
        sigma = np.array([[2.0, 0.6], [0.6, 1.0]])
        root = inverse_square_root(sigma)
        np.testing.assert_allclose(root @ sigma @ root, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(root, root.T)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError, match="positive definite"):
            inverse_square_root(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_whitened_gaussian_has_identity_covariance(self, rng):
        sigma = np.array([[2.0, 0.6], [0.6, 1.0]])
        t = 9.0
        samples = rng.multivariate_normal(np.zeros(2), t * sigma, size=20000)
        white = whiten(samples, t, sigma)
        np.testing.assert_allclose(white.T @ white / len(white), np.eye(2), atol=0.05)


class TestCLTReport:
    """Tests for report summaries."""

    def test_errors(self):
        report = CLTReport(10.0, 100, (0.05, 0.1), (0.4, 0.02), np.array([[1.1, 0.05], [0.05, 0.9]]))
        assert report.covariance_error == pytest.approx(0.1)
        assert report.operator_error == pytest.approx(np.linalg.norm(np.array([[0.1, 0.05], [0.05, -0.1]]), 2))
        assert report.min_p_value == 0.02

    def test_degenerate_at_zero_time(self, cover_d1):
        report = clt_diagnostic(ConstantCurvature(), 0.0, 100, np.eye(1), 1, cover_d1)
        assert report.degenerate
        assert math.isnan(report.min_p_value)

    def test_report_shape(self, cover_d2):
        report = clt_diagnostic(ConstantCurvature(), 4.0, 200, np.eye(2), 1, cover_d2)
        assert len(report.ks_statistics) == 2
        assert report.whitened_covariance.shape == (2, 2)
        assert all(0.0 <= p <= 1.0 for p in report.p_values)
