"""
Cover bookkeeping types.

A Z^d-cover of the surface is fixed by d homology classes: the abelianization sends a generator word
to Z^4 (basis a1, b1, a2, b2) and a d×4 projection selects the deck coordinates. Points of the cover's
unit tangent bundle are a domain-reduced frame together with the deck coordinate of their copy.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from horocover.geometry import HOMOLOGY_IMAGES, FuchsianGroup, GeneratorName, IsometryMatrix, octagon_group
from horocover.geometry.domain import reduce_to_domain
from horocover.presets import get_projection


@dataclass(frozen=True)
class AbelianizationMap:
    """Generator words -> Z^4 -> Z^d."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.rows)
        if not rows:
            raise ValueError("Projection needs at least one row")
        if any(len(row) != 4 for row in rows):
            raise ValueError(f"Projection rows must have 4 integer entries, got {rows}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_preset(cls, name: str) -> AbelianizationMap:
        return cls(get_projection(name))

    @property
    def dimension(self) -> int:
        return len(self.rows)

    @property
    def matrix(self) -> np.ndarray:
        """Projection as a (d, 4) integer array."""
        return np.array(self.rows, dtype=np.int64)

    def homology(self, word: Iterable[GeneratorName | str]) -> np.ndarray:
        """Signed count of generators in `word`, an element of Z^4."""
        total = np.zeros(4, dtype=np.int64)
        for name in word:
            total += HOMOLOGY_IMAGES[GeneratorName(name).position]
        return total

    def image(self, word: Iterable[GeneratorName | str]) -> np.ndarray:
        """Deck class of `word` in Z^d."""
        return self.matrix @ self.homology(word)

    def project(self, homology: np.ndarray) -> np.ndarray:
        """Project homology vectors (..., 4) to deck vectors (..., d)."""
        return np.asarray(homology, dtype=np.int64) @ self.matrix.T


@dataclass(frozen=True)
class ZdCover:
    """The surface group together with the abelianization defining the cover."""

    group: FuchsianGroup = field(repr=False, compare=False)
    abelianization: AbelianizationMap

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], group: FuchsianGroup | None = None) -> ZdCover:
        return cls(group or octagon_group(), AbelianizationMap(tuple(tuple(r) for r in rows)))

    @classmethod
    def from_preset(cls, name: str, group: FuchsianGroup | None = None) -> ZdCover:
        return cls(group or octagon_group(), AbelianizationMap.from_preset(name))

    @property
    def dimension(self) -> int:
        return self.abelianization.dimension

    def lift(self, x: IsometryMatrix) -> CoverPoint:
        """Cover point of a frame of T¹H, with deck coordinate of the tile containing it."""
        base, word = reduce_to_domain(x, self.group)
        # x = W⁻¹·base lies in the tile W⁻¹·F
        deck = -self.abelianization.image(word)
        return CoverPoint(base, tuple(int(v) for v in deck))


@dataclass(frozen=True)
class CoverPoint:
    """Point of the cover's unit tangent bundle: domain-reduced frame plus deck coordinate."""

    base: IsometryMatrix
    deck: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "deck", tuple(int(v) for v in self.deck))

    @classmethod
    def at(cls, base: IsometryMatrix, dimension: int) -> CoverPoint:
        """Point in the base copy (deck 0)."""
        return cls(base, (0,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.deck)

    def shifted(self, deck: Sequence[int]) -> CoverPoint:
        """Image under the deck transformation translating by `deck`."""
        if len(deck) != self.dimension:
            raise ValueError(f"Deck vector of length {len(deck)} does not match dimension {self.dimension}")
        return CoverPoint(self.base, tuple(a + int(b) for a, b in zip(self.deck, deck, strict=True)))

    def deck_array(self) -> np.ndarray:
        return np.array(self.deck, dtype=np.int64)


@dataclass(frozen=True)
class TwistParameter:
    """Point ω of the torus R^d / Z^d, optionally kept as a lift in R^d."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def zero(cls, dimension: int) -> TwistParameter:
        return cls((0.0,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.values)

    def reduced(self) -> TwistParameter:
        """Components reduced to [0, 1)."""
        return TwistParameter(tuple(float(np.mod(v, 1.0)) for v in self.values))

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def __neg__(self) -> TwistParameter:
        return TwistParameter(tuple(-v for v in self.values))


@dataclass(frozen=True)
class WindingVector:
    """
    Deck displacement accumulated along an orbit segment.

    Combinatorial windings are integral; pairings with twist parameters are real.
    """

    values: tuple[float, ...]
    time: float = 0.0
    start: CoverPoint | None = None

    def as_array(self) -> np.ndarray:
        return np.array(self.values)

    def pairing(self, omega: TwistParameter | np.ndarray) -> float:
        """ω·w."""
        omega = omega.as_array() if isinstance(omega, TwistParameter) else np.asarray(omega, dtype=float)
        return float(np.dot(omega, self.as_array()))

    def __add__(self, other: WindingVector) -> WindingVector:
        """Concatenation of consecutive orbit segments."""
        if len(self.values) != len(other.values):
            raise ValueError("Cannot concatenate windings of different dimensions")
        values = tuple(a + b for a, b in zip(self.values, other.values, strict=True))
        return WindingVector(values, self.time + other.time, self.start)
