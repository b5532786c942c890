"""Tests for fundamental-domain reduction and volume sampling."""

import numpy as np
import pytest

from horocover.errors import NonTermination
from horocover.geometry import (
    INRADIUS,
    GeneratorName,
    IsometryMatrix,
    advance_and_reduce,
    center_profile,
    frame_from_polar,
    geodesic_batch,
    in_domain,
    reduce_batch,
    reduce_to_domain,
    sample_domain_frames,
)
from horocover.geometry.models import determinant_batch


class TestReduceToDomain:
    """Tests for single-frame reduction."""

    def test_generator_reduces_to_identity(self, group):
        """A generator is moved back by its inverse."""
        reduced, word = reduce_to_domain(group.generator("a1"), group)
        assert word == (GeneratorName.A1_INV,)
        assert reduced.is_close(IsometryMatrix.identity(), atol=1e-12)

    def test_word_reproduces_reduction(self, group):
        """reduced = W·x with W the applied generators, last one leftmost."""
        x = group.evaluate_word(["a1", "b2", "a2"]) @ IsometryMatrix.rotation(0.4) @ IsometryMatrix.geodesic(0.3)
        reduced, word = reduce_to_domain(x, group)
        product = group.evaluate_word(tuple(reversed(word)))
        assert reduced.is_close(product @ x, atol=1e-10)
        assert bool(in_domain(reduced.as_array(), group)[0])

    def test_domain_frame_is_unchanged(self, group, domain_frames):
        """Frames already in the domain need no generator."""
        _, word = reduce_to_domain(IsometryMatrix.from_array(domain_frames[0]), group)
        assert word == ()

    def test_step_budget(self, group):
        """A frame far away exceeds a tiny step budget."""
        far = IsometryMatrix.geodesic(20.0)
        with pytest.raises(NonTermination, match="more than 2 steps"):
            reduce_to_domain(far, group, max_steps=2)


class TestReduceBatch:
    """Tests for batch reduction."""

    def test_matches_single_reduction(self, group, domain_frames):
        """Batch homology equals the homology of the single-frame words."""
        moved = geodesic_batch(domain_frames, 4.0)
        reduced, homology, steps = reduce_batch(moved, group)
        for k in range(moved.shape[0]):
            single, word = reduce_to_domain(IsometryMatrix.from_array(moved[k]), group)
            assert single.is_close(IsometryMatrix.from_array(reduced[k]), atol=1e-10)
            np.testing.assert_array_equal(homology[k], sum((n.homology for n in word), np.zeros(4, dtype=np.int64)))
            assert steps[k] == len(word)

    def test_long_flow_keeps_unit_determinant(self, group, domain_frames):
        """Reduction after every chunk keeps matrices bounded and unimodular."""
        end, _, _ = advance_and_reduce(domain_frames, 200.0, group, geodesic_batch)
        np.testing.assert_allclose(determinant_batch(end), 1.0, atol=1e-12)
        assert np.all(in_domain(end, group))

    def test_step_budget_retries_once(self, group, domain_frames, caplog):
        """Stalled frames are nudged and reduced again before the batch gives up."""
        frames = np.concatenate([domain_frames[:3], IsometryMatrix.geodesic(20.0).as_array()[None]])
        with caplog.at_level("WARNING", logger="horocover.geometry.domain"):
            with pytest.raises(NonTermination, match="also after a 1e-12 perturbation"):
                reduce_batch(frames, group, max_steps=2)
        assert "stalled for 1 of 4 frames" in caplog.text

    def test_no_retry_within_budget(self, group, domain_frames, caplog):
        with caplog.at_level("WARNING", logger="horocover.geometry.domain"):
            reduce_batch(geodesic_batch(domain_frames, 3.0), group)
        assert "stalled" not in caplog.text

    def test_chunk_step_range(self, group, domain_frames):
        """Chunks longer than one are refused."""
        with pytest.raises(ValueError, match="Chunk step"):
            advance_and_reduce(domain_frames, 3.0, group, geodesic_batch, step=2.0)


class TestSampling:
    """Tests for volume sampling and the center profile."""

    def test_samples_lie_in_domain(self, group, rng):
        """Rejection sampling keeps only domain frames."""
        frames = sample_domain_frames(rng, 200, group)
        assert frames.shape == (200, 2, 2)
        assert np.all(in_domain(frames, group))

    def test_sampling_is_reproducible(self, group):
        """Same generator seed, same frames."""
        first = sample_domain_frames(np.random.default_rng(1), 10, group)
        second = sample_domain_frames(np.random.default_rng(1), 10, group)
        np.testing.assert_array_equal(first, second)

    def test_center_profile_support(self):
        """1 at the center, 0 from the inscribed circle on."""
        frames = frame_from_polar(np.array([0.0, 0.5 * INRADIUS, INRADIUS, INRADIUS + 0.1]), 0.3, 0.0)
        values = center_profile(frames)
        assert values[0] == pytest.approx(1.0)
        assert 0.0 < values[1] < 1.0
        assert values[2] == pytest.approx(0.0, abs=1e-15)
        assert values[3] == 0.0

    def test_center_profile_is_group_invariant(self, group, domain_frames):
        """Reduced representatives of the same point share the profile value."""
        moved = group.generator("b1").as_array() @ domain_frames
        reduced, _, _ = reduce_batch(moved, group)
        np.testing.assert_allclose(center_profile(reduced), center_profile(domain_frames), atol=1e-9)
