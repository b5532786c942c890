"""
Isometry matrices and the regular-octagon surface group.

Points of the unit tangent bundle of the hyperbolic plane are unit-determinant 2x2 matrices up to sign
(T¹H ≅ PSL(2,R)): the matrix x represents the unit vector at x·i obtained by pushing the upward vector
at i forward by x. Group elements act on the left, flows act on the right.

Batch helpers operate on arrays of shape (..., 2, 2) so that whole orbit farms can be reduced at once.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cache, lru_cache

import numpy as np

from horocover.errors import ValidationError

from .constants import (
    CIRCUMRADIUS,
    GENERATOR_ORDER,
    HOMOLOGY_IMAGES,
    INRADIUS,
    PAIRED_SIDE,
    RELATOR,
    SIDE_ANGLES,
    SIDE_COUNT,
    SIDE_GENERATORS,
    TRANSLATION_LENGTH,
    GeneratorName,
)

logger = logging.getLogger(__name__)

RELATION_TOLERANCE = 1e-8
SIDE_PAIRING_TOLERANCE = 1e-8


@dataclass(frozen=True)
class IsometryMatrix:
    """Orientation-preserving isometry of the hyperbolic plane, [[a, b], [c, d]] up to sign."""

    a: float
    b: float
    c: float
    d: float

    # ===== Constructors =====

    @classmethod
    def identity(cls) -> IsometryMatrix:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> IsometryMatrix:
        """Create from a (2, 2) array."""
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (2, 2):
            raise ValueError(f"Expected a (2, 2) array, got shape {arr.shape}")
        return cls(float(arr[0, 0]), float(arr[0, 1]), float(arr[1, 0]), float(arr[1, 1]))

    @classmethod
    def rotation(cls, angle: float) -> IsometryMatrix:
        """Rotation about i by `angle` (counterclockwise in the disk model)."""
        return cls.from_array(rotation_array(angle))

    @classmethod
    def geodesic(cls, t: float) -> IsometryMatrix:
        """The diagonal element a_t = diag(e^{t/2}, e^{-t/2})."""
        return cls.from_array(geodesic_array(t))

    @classmethod
    def horocycle(cls, s: float) -> IsometryMatrix:
        """The upper-triangular unipotent n_s."""
        return cls(1.0, float(s), 0.0, 1.0)

    @classmethod
    def unstable_horocycle(cls, s: float) -> IsometryMatrix:
        """The lower-triangular unipotent, expanding under the geodesic flow."""
        return cls(1.0, 0.0, float(s), 1.0)

    # ===== Algebra =====

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def __matmul__(self, other: IsometryMatrix) -> IsometryMatrix:
        return IsometryMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> IsometryMatrix:
        """Inverse assuming unit determinant."""
        return IsometryMatrix(self.d, -self.b, -self.c, self.a)

    @property
    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def norm_squared(self) -> float:
        """a² + b² + c² + d², equal to 2·cosh of the distance moved by i."""
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def renormalized(self) -> IsometryMatrix:
        """Rescale to unit determinant and canonical sign."""
        return IsometryMatrix.from_array(renormalize_batch(self.as_array()))

    def canonical(self) -> IsometryMatrix:
        """Representative whose first nonzero entry is positive."""
        return IsometryMatrix.from_array(canonicalize_batch(self.as_array()))

    def distance_to(self, other: IsometryMatrix) -> float:
        """Max entrywise difference between the two PSL(2,R) classes (sign-insensitive)."""
        mine = self.as_array()
        theirs = other.as_array()
        return float(min(np.max(np.abs(mine - theirs)), np.max(np.abs(mine + theirs))))

    def is_close(self, other: IsometryMatrix, atol: float = 1e-12) -> bool:
        return self.distance_to(other) <= atol

    # ===== Geometry =====

    @property
    def basepoint(self) -> complex:
        """Basepoint x·i in the upper half-plane."""
        return (self.a * 1j + self.b) / (self.c * 1j + self.d)

    @property
    def translation_length(self) -> float:
        """Distance moved along the axis; 0 for elliptic and parabolic elements."""
        trace = abs(self.a + self.d)
        return 2.0 * math.acosh(trace / 2.0) if trace > 2.0 else 0.0

    def axis_frame(self) -> IsometryMatrix:
        """
        Frame on the axis of a hyperbolic element, pointing toward its attracting fixed point.

        With ℓ the translation length, self·x = x·a_ℓ up to sign, so flowing x for time ℓ lands
        on the translate of x by self.

        Raises:
            ValueError: If the element is not hyperbolic
        """
        if self.translation_length == 0.0:
            raise ValueError(f"{self!r} is not hyperbolic; it has no axis")
        matrix = self.as_array() * (1.0 if self.a + self.d > 0 else -1.0)
        values, vectors = np.linalg.eig(matrix)
        order = np.argsort(-values.real)
        frame = vectors[:, order].real
        det = frame[0, 0] * frame[1, 1] - frame[0, 1] * frame[1, 0]
        if det < 0:
            frame[:, 1] *= -1.0
            det = -det
        return IsometryMatrix.from_array(canonicalize_batch(frame / math.sqrt(det)))

    def __repr__(self) -> str:
        return f"IsometryMatrix([[{self.a:.6g}, {self.b:.6g}], [{self.c:.6g}, {self.d:.6g}]])"


# ===== Array primitives =====


def rotation_array(angle: float) -> np.ndarray:
    half = 0.5 * angle
    return np.array([[math.cos(half), math.sin(half)], [-math.sin(half), math.cos(half)]])


def geodesic_array(t: float) -> np.ndarray:
    return np.array([[math.exp(0.5 * t), 0.0], [0.0, math.exp(-0.5 * t)]])


def horocycle_batch(s: np.ndarray) -> np.ndarray:
    """Stack of n_s for every entry of s, shape s.shape + (2, 2)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape + (2, 2))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = 1.0
    out[..., 0, 1] = s
    return out


def renormalize_batch(x: np.ndarray) -> np.ndarray:
    """Rescale each matrix to unit determinant and canonicalize its sign."""
    x = np.asarray(x, dtype=float)
    det = x[..., 0, 0] * x[..., 1, 1] - x[..., 0, 1] * x[..., 1, 0]
    if np.any(det <= 0.0):
        raise ValueError(f"Matrix with non-positive determinant cannot be renormalized (min det {np.min(det)})")
    return canonicalize_batch(x / np.sqrt(det)[..., None, None])


def canonicalize_batch(x: np.ndarray) -> np.ndarray:
    """Flip signs so that the first nonzero entry of each matrix is positive."""
    x = np.array(x, dtype=float, copy=True)
    flat = x.reshape(x.shape[:-2] + (4,))
    nonzero = flat != 0.0
    first = np.argmax(nonzero, axis=-1)
    lead = np.take_along_axis(flat, first[..., None], axis=-1)[..., 0]
    sign = np.where(lead < 0.0, -1.0, 1.0)
    return x * sign[..., None, None]


def determinant_batch(x: np.ndarray) -> np.ndarray:
    return x[..., 0, 0] * x[..., 1, 1] - x[..., 0, 1] * x[..., 1, 0]


def inverse_batch(x: np.ndarray) -> np.ndarray:
    """Inverse of unit-determinant matrices."""
    out = np.empty_like(x)
    out[..., 0, 0] = x[..., 1, 1]
    out[..., 1, 1] = x[..., 0, 0]
    out[..., 0, 1] = -x[..., 0, 1]
    out[..., 1, 0] = -x[..., 1, 0]
    return out


def norm_squared_batch(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=(-2, -1))


# ===== Group =====


@dataclass(frozen=True)
class GroupElement:
    """A group element with the word that produced it and its homology class in Z^4."""

    matrix: IsometryMatrix
    word: tuple[GeneratorName, ...]
    homology: tuple[int, ...]


def side_pairing_element(from_side: int, to_side: int) -> IsometryMatrix:
    """
    Isometry carrying side `from_side` of the octagon onto side `to_side`,
    sending the octagon to its neighbor across `to_side`.
    """
    translation = IsometryMatrix.geodesic(TRANSLATION_LENGTH)
    return (
        IsometryMatrix.rotation(SIDE_ANGLES[to_side])
        @ translation
        @ IsometryMatrix.rotation(math.pi - SIDE_ANGLES[from_side])
    ).renormalized()


class FuchsianGroup:
    """
    Cocompact surface group generated by the side pairings of the regular octagon.

    The fundamental domain is the Dirichlet domain centered at i (the disk origin): a point lies in it
    when no generator moves it closer to the center.
    """

    def __init__(self, generators: dict[GeneratorName, IsometryMatrix], validate: bool = True):
        """
        Initialize from generator matrices.

        Args:
            generators: Matrix for every GeneratorName (generators and inverses)
            validate: Check the surface relation and the side pairing

        Raises:
            ValueError: If a generator is missing
            ValidationError: If the relation or side-pairing residual exceeds 1e-8
        """
        missing = set(GENERATOR_ORDER) - set(generators)
        if missing:
            raise ValueError(f"Missing generator matrices: {sorted(g.value for g in missing)}")

        self._generators = {name: generators[name].renormalized() for name in GENERATOR_ORDER}
        self._matrices = np.stack([self._generators[name].as_array() for name in GENERATOR_ORDER])
        self._matrices.setflags(write=False)

        if validate:
            residual = self.relation_residual()
            if residual > RELATION_TOLERANCE:
                raise ValidationError(f"Surface relation residual {residual:.3e} exceeds {RELATION_TOLERANCE:g}")
            pairing = self.side_pairing_residual()
            if pairing > SIDE_PAIRING_TOLERANCE:
                raise ValidationError(f"Side pairing residual {pairing:.3e} exceeds {SIDE_PAIRING_TOLERANCE:g}")
            logger.debug(f"Octagon group validated: relation {residual:.2e}, pairing {pairing:.2e}")

    @classmethod
    def regular_octagon(cls) -> FuchsianGroup:
        """Group of the regular octagon with vertex angle 2π/8."""
        generators = {}
        for side, name in SIDE_GENERATORS.items():
            generators[name] = side_pairing_element(PAIRED_SIDE[side], side)
        return cls(generators)

    # ===== Generators =====

    @property
    def matrices(self) -> np.ndarray:
        """Generator matrices stacked in GENERATOR_ORDER, shape (8, 2, 2)."""
        return self._matrices

    def generator(self, name: GeneratorName | str) -> IsometryMatrix:
        return self._generators[GeneratorName(name)]

    def evaluate_word(self, word: Iterable[GeneratorName | str]) -> IsometryMatrix:
        """Product of the generators in `word`, left to right."""
        result = IsometryMatrix.identity()
        for name in word:
            result = result @ self.generator(name)
        return result.renormalized()

    # ===== Validation =====

    def relation_residual(self) -> float:
        """Entrywise distance of the relator product from ±identity."""
        return self.evaluate_word(RELATOR).distance_to(IsometryMatrix.identity())

    def side_frame(self, side: int, u: float = 0.0) -> IsometryMatrix:
        """Frame on side `side`, tangent to it, at signed arclength `u` from the side midpoint."""
        return (
            IsometryMatrix.rotation(SIDE_ANGLES[side])
            @ IsometryMatrix.geodesic(INRADIUS)
            @ IsometryMatrix.rotation(0.5 * math.pi)
            @ IsometryMatrix.geodesic(u)
        ).renormalized()

    def side_pairing_residual(self, samples: int = 17) -> float:
        """
        Largest defect of the side pairing over sampled boundary points.

        Points of side PAIRED_SIDE[j] pushed by SIDE_GENERATORS[j] must be equidistant from the center
        and from its mirror image across side j, and must stay within the angular span of side j.
        """
        worst = 0.0
        for side in range(SIDE_COUNT):
            source = PAIRED_SIDE[side]
            element = self.generator(SIDE_GENERATORS[side])
            for u in np.linspace(-INRADIUS, INRADIUS, samples):
                image = element @ self.side_frame(source, float(u))
                to_center = math.acosh(max(1.0, 0.5 * image.norm_squared))
                to_mirror = math.acosh(max(1.0, 0.5 * (element.inverse() @ image).norm_squared))
                worst = max(worst, abs(to_center - to_mirror))

                z = image.basepoint
                w = (z - 1j) / (z + 1j)
                offset = (math.atan2(w.imag, w.real) - SIDE_ANGLES[side] + math.pi) % (2 * math.pi) - math.pi
                worst = max(worst, max(0.0, abs(offset) - math.pi / 8.0))
        return worst

    # ===== Enumeration =====

    def elements_within(self, radius: float) -> tuple[GroupElement, ...]:
        """
        All group elements moving the domain center by at most `radius`.

        Breadth-first search over the tiling: a tile is expanded while its center lies within
        radius + circumradius of the origin, which reaches every tile met by the ball. Results are
        memoized per (group, radius) at module level.
        """
        return _elements_within(self, round(float(radius), 9))

    def __repr__(self) -> str:
        return f"FuchsianGroup(regular octagon, relation residual {self.relation_residual():.2e})"

    def __setstate__(self, state: dict) -> None:
        self.__dict__.update(state)
        self._matrices.setflags(write=False)


@lru_cache(maxsize=64)
def _elements_within(group: FuchsianGroup, radius: float) -> tuple[GroupElement, ...]:
    limit = math.cosh(radius + CIRCUMRADIUS) * 2.0
    wanted = math.cosh(radius) * 2.0 + 1e-9

    start = GroupElement(IsometryMatrix.identity(), (), (0, 0, 0, 0))
    seen = {_matrix_key(start.matrix)}
    queue = deque([start])
    found = []
    while queue:
        element = queue.popleft()
        if element.matrix.norm_squared <= wanted:
            found.append(element)
        for name in GENERATOR_ORDER:
            matrix = (element.matrix @ group.generator(name)).renormalized()
            if matrix.norm_squared > limit:
                continue
            matrix_key = _matrix_key(matrix)
            if matrix_key in seen:
                continue
            seen.add(matrix_key)
            homology = tuple(int(v) for v in np.asarray(element.homology) + HOMOLOGY_IMAGES[name.position])
            queue.append(GroupElement(matrix, element.word + (name,), homology))

    found.sort(key=lambda item: (item.matrix.norm_squared, len(item.word)))
    logger.debug(f"Enumerated {len(found)} group elements within distance {radius:.3f}")
    return tuple(found)


def _matrix_key(matrix: IsometryMatrix) -> tuple[int, ...]:
    canonical = matrix.canonical()
    return tuple(int(round(v * 1e6)) for v in (canonical.a, canonical.b, canonical.c, canonical.d))


def free_reduce(word: Sequence[GeneratorName | str]) -> tuple[GeneratorName, ...]:
    """Cancel adjacent generator/inverse pairs."""
    stack: list[GeneratorName] = []
    for item in word:
        name = GeneratorName(item)
        if stack and stack[-1] is name.inverse:
            stack.pop()
        else:
            stack.append(name)
    return tuple(stack)


def invert_word(word: Sequence[GeneratorName | str]) -> tuple[GeneratorName, ...]:
    return tuple(GeneratorName(item).inverse for item in reversed(word))


@cache
def octagon_group() -> FuchsianGroup:
    """Shared, validated regular-octagon group."""
    return FuchsianGroup.regular_octagon()
