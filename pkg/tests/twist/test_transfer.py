"""Tests for the transfer operators."""

import math

import numpy as np
import pytest

from horocover.cover import CoverPoint, TwistParameter
from horocover.geometry import IsometryMatrix
from horocover.renorm import ConstantCurvature, SamplerCurvature
from horocover.twist import (
    backward_weight,
    project_twist,
    project_twist_batch,
    transfer_apply,
    twisted_transfer_apply,
    twisted_transfer_batch,
    twisted_transfer_via_frobenius,
)


@pytest.fixture
def model():
    return ConstantCurvature()


class TestUntwistedTransfer:
    """Tests for ℒ_t."""

    def test_constant_function(self, start_point, cover_d1, model):
        assert transfer_apply(lambda x: 1.0, 2.0, start_point, cover_d1, model) == pytest.approx(math.exp(2.0))

    def test_zero_time(self, start_point, cover_d1, model, observable):
        assert transfer_apply(observable, 0.0, start_point, cover_d1, model) == pytest.approx(observable(start_point))

    def test_negative_time(self, start_point, cover_d1, model):
        with pytest.raises(ValueError, match="t >= 0"):
            transfer_apply(lambda x: 1.0, -1.0, start_point, cover_d1, model)

    def test_sampler_weight_bounds(self, start_point, cover_d1):
        sampler = SamplerCurvature(1.5, 0.5)
        weight = backward_weight(sampler, start_point, 1.0, cover_d1)
        assert math.exp(1.0) * 0.99 <= weight <= math.exp(math.sqrt(2.0)) * 1.01


class TestTwistedTransfer:
    """Tests for ℒ^(ω)_t."""

    def test_zero_twist_is_untwisted(self, start_point, cover_d1, model, observable):
        u = lambda x: project_twist(observable, (0.0,), x)  # noqa: E731
        assert twisted_transfer_apply(u, (0.0,), 3.0, start_point, cover_d1, model) == pytest.approx(
            transfer_apply(u, 3.0, start_point, cover_d1, model)
        )

    def test_integer_twist_is_untwisted(self, start_point, cover_d1, model):
        assert twisted_transfer_apply(lambda x: 1.0, (1.0,), 4.0, start_point, cover_d1, model) == pytest.approx(
            math.exp(4.0)
        )

    def test_modulus_of_twist(self, start_point, cover_d1, model):
        value = twisted_transfer_apply(lambda x: 1.0, (0.37,), 5.0, start_point, cover_d1, model)
        assert abs(value) == pytest.approx(math.exp(5.0))

    @pytest.mark.parametrize("omega", [(0.1,), (0.5,), (0.83,)])
    def test_matches_frobenius_form(self, start_point, cover_d1, model, omega):
        """Twisting the transfer equals transferring e^(2πi F_(t,ω))·u."""
        u = lambda x: 1.0 + 0.1 * x.deck[0]  # noqa: E731
        direct = twisted_transfer_apply(u, omega, 4.0, start_point, cover_d1, model)
        via = twisted_transfer_via_frobenius(u, omega, 4.0, start_point, cover_d1, model)
        assert direct == pytest.approx(via, rel=1e-12)

    def test_batch_matches_single(self, domain_frames, cover_d2, model, observable_d2):
        omega = TwistParameter((0.3, 0.1))
        decks = np.zeros((5, 2), dtype=np.int64)
        frames = domain_frames[:5]
        batch = twisted_transfer_batch(
            lambda y, d: project_twist_batch(observable_d2, omega, y, d), omega, 2.0, frames, decks, cover_d2, model
        )
        for k in range(5):
            point = CoverPoint(IsometryMatrix.from_array(frames[k]), (0, 0))
            single = twisted_transfer_apply(
                lambda x: project_twist(observable_d2, omega, x), omega, 2.0, point, cover_d2, model
            )
            assert batch[k] == pytest.approx(single, abs=1e-12)

    def test_batch_zero_time(self, domain_frames, cover_d1, model, observable):
        decks = np.zeros((20, 1), dtype=np.int64)
        values = twisted_transfer_batch(observable.evaluate, (0.2,), 0.0, domain_frames, decks, cover_d1, model)
        np.testing.assert_allclose(values, observable.evaluate(domain_frames, decks))


class TestTwistedSemigroup:
    """Tests for the composition and conjugation laws of ℒ^(ω)_t."""

    @pytest.mark.parametrize("omega", [(0.0,), (0.3,), (0.71,)])
    @pytest.mark.parametrize("t1,t2", [(0.7, 1.1), (1.5, 0.4)])
    def test_composition(self, start_point, cover_d1, model, observable, omega, t1, t2):
        """ℒ^(ω)_t1 ℒ^(ω)_t2 = ℒ^(ω)_(t1+t2)."""
        u = lambda x: 1.0 + 0.25 * x.deck[0] + observable(x)  # noqa: E731
        inner = lambda y: twisted_transfer_apply(u, omega, t2, y, cover_d1, model)  # noqa: E731
        composed = twisted_transfer_apply(inner, omega, t1, start_point, cover_d1, model)
        direct = twisted_transfer_apply(u, omega, t1 + t2, start_point, cover_d1, model)
        assert composed == pytest.approx(direct, rel=1e-9)

    def test_composition_on_the_z2_cover(self, domain_frames, cover_d2, model):
        omega = (0.2, -0.45)
        point = CoverPoint.at(IsometryMatrix.from_array(domain_frames[3]), 2)
        u = lambda x: 1.0 + 0.5 * x.deck[0] - 0.25 * x.deck[1]  # noqa: E731
        inner = lambda y: twisted_transfer_apply(u, omega, 1.2, y, cover_d2, model)  # noqa: E731
        composed = twisted_transfer_apply(inner, omega, 0.9, point, cover_d2, model)
        direct = twisted_transfer_apply(u, omega, 2.1, point, cover_d2, model)
        assert composed == pytest.approx(direct, rel=1e-9)

    @pytest.mark.parametrize("curvature", [ConstantCurvature(), SamplerCurvature(1.5, 0.5)])
    def test_opposite_twist_conjugates(self, start_point, cover_d1, observable, curvature):
        """For real u, ℒ^(-ω)_t u is the complex conjugate of ℒ^(ω)_t u."""
        u = lambda x: 1.0 + 0.25 * x.deck[0] + observable(x)  # noqa: E731
        plus = twisted_transfer_apply(u, (0.37,), 2.0, start_point, cover_d1, curvature)
        minus = twisted_transfer_apply(u, (-0.37,), 2.0, start_point, cover_d1, curvature)
        assert minus == pytest.approx(plus.conjugate(), rel=1e-12)
