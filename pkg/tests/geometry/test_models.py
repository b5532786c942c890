"""Tests for isometry matrices and the octagon surface group."""

import math
import pickle

import numpy as np
import pytest

from horocover.errors import ValidationError
from horocover.geometry import (
    GENERATOR_ORDER,
    INRADIUS,
    RELATOR,
    FuchsianGroup,
    GeneratorName,
    IsometryMatrix,
    free_reduce,
    invert_word,
)


class TestGeneratorName:
    """Tests for generator names and their homology images."""

    def test_inverse_pairs(self):
        """Every generator's inverse is the upper-case name, and inverting twice is the identity."""
        assert GeneratorName.A1.inverse is GeneratorName.A1_INV
        assert GeneratorName("B2") is GeneratorName.B2_INV
        for name in GENERATOR_ORDER:
            assert name.inverse.inverse is name

    def test_homology_images(self):
        """Generators map to the standard basis of Z^4, inverses to its negatives."""
        np.testing.assert_array_equal(GeneratorName.B1.homology, [0, 1, 0, 0])
        np.testing.assert_array_equal(GeneratorName.A2_INV.homology, [0, 0, -1, 0])

    def test_relator_has_zero_homology(self):
        """The surface relator is a product of commutators."""
        total = sum(name.homology for name in RELATOR)
        np.testing.assert_array_equal(total, [0, 0, 0, 0])


class TestIsometryMatrix:
    """Tests for the PSL(2,R) wrapper."""

    def test_from_array_rejects_wrong_shape(self):
        """Only (2, 2) arrays convert."""
        with pytest.raises(ValueError, match="Expected a \\(2, 2\\) array"):
            IsometryMatrix.from_array(np.eye(3))

    def test_inverse(self):
        """x·x⁻¹ is the identity."""
        x = IsometryMatrix.rotation(0.7) @ IsometryMatrix.geodesic(1.3) @ IsometryMatrix.horocycle(-0.4)
        assert (x @ x.inverse()).is_close(IsometryMatrix.identity(), atol=1e-12)

    def test_distance_ignores_sign(self):
        """x and -x are the same point of PSL(2,R)."""
        x = IsometryMatrix.geodesic(0.5)
        assert x.distance_to(IsometryMatrix(-x.a, -x.b, -x.c, -x.d)) == 0.0

    def test_translation_length_of_geodesic(self):
        """a_t translates its axis by t."""
        assert math.isclose(IsometryMatrix.geodesic(2.5).translation_length, 2.5, rel_tol=1e-12)

    def test_elliptic_has_no_axis(self):
        """Rotations are not hyperbolic."""
        with pytest.raises(ValueError, match="not hyperbolic"):
            IsometryMatrix.rotation(1.0).axis_frame()

    def test_axis_frame_flows_onto_translate(self, group):
        """Flowing the axis frame for the translation length lands on its translate."""
        element = group.generator("a1")
        frame = element.axis_frame()
        flowed = frame @ IsometryMatrix.geodesic(element.translation_length)
        assert flowed.is_close(element @ frame, atol=1e-9)


class TestFuchsianGroup:
    """Tests for the regular-octagon group."""

    def test_relation_residual(self, group):
        """The relator evaluates to the identity."""
        assert group.relation_residual() <= 1e-8

    def test_side_pairing_residual(self, group):
        """Side pairings glue the octagon to its neighbours."""
        assert group.side_pairing_residual() <= 1e-8

    def test_generators_are_hyperbolic(self, group):
        """Side pairings of a closed surface have no fixed points."""
        for name in GENERATOR_ORDER:
            assert group.generator(name).translation_length > 0

    def test_generator_inverses(self, group):
        """The matrix of an upper-case name inverts the lower-case one."""
        for name in GENERATOR_ORDER[:4]:
            product = group.generator(name) @ group.generator(name.inverse)
            assert product.is_close(IsometryMatrix.identity(), atol=1e-12)

    def test_missing_generator(self, group):
        """Construction needs all eight matrices."""
        generators = {name: group.generator(name) for name in GENERATOR_ORDER[1:]}
        with pytest.raises(ValueError, match="Missing generator matrices"):
            FuchsianGroup(generators)

    def test_broken_relation_fails_validation(self, group):
        """A perturbed generator breaks the relation."""
        generators = {name: group.generator(name) for name in GENERATOR_ORDER}
        generators[GeneratorName.A1] = generators[GeneratorName.A1] @ IsometryMatrix.geodesic(1e-3)
        with pytest.raises(ValidationError, match="residual"):
            FuchsianGroup(generators)

    def test_elements_within_neighbours(self, group):
        """The eight generators move the center by exactly twice the inradius."""
        assert len(group.elements_within(0.0)) == 1
        neighbours = group.elements_within(2.0 * INRADIUS + 1e-6)
        assert len(neighbours) == 9
        words = {element.word for element in neighbours}
        assert {(name,) for name in GENERATOR_ORDER} <= words

    def test_elements_within_is_memoized(self, group):
        first = group.elements_within(2.5)
        assert group.elements_within(2.5 + 1e-12) is first
        assert not hasattr(group, "_cache")

    def test_pickled_group_enumerates_the_same(self, group):
        restored = pickle.loads(pickle.dumps(group))
        assert [e.word for e in restored.elements_within(2.5)] == [e.word for e in group.elements_within(2.5)]
        assert not restored.matrices.flags.writeable

    def test_elements_within_homology(self, group):
        """Each enumerated element carries the homology of its word."""
        for element in group.elements_within(3.0):
            expected = sum((name.homology for name in element.word), np.zeros(4, dtype=np.int64))
            np.testing.assert_array_equal(element.homology, expected)
            assert group.evaluate_word(element.word).is_close(element.matrix, atol=1e-9)


class TestWords:
    """Tests for word helpers."""

    def test_free_reduce(self):
        """Adjacent inverse pairs cancel, repeatedly."""
        assert free_reduce(["a1", "b1", "B1", "A1", "a2"]) == (GeneratorName.A2,)

    def test_invert_word(self, group):
        """A word times its inverse is the identity."""
        word = ["a1", "b2", "A2"]
        product = group.evaluate_word([*word, *invert_word(word)])
        assert product.is_close(IsometryMatrix.identity(), atol=1e-12)
