"""
Constants of the regular-octagon genus-2 surface.

The fundamental domain is the regular hyperbolic octagon centered at the disk origin with all vertex
angles equal to 2π/8. Side j has its midpoint at polar angle j·π/4; the side-pairing element s_j maps
the octagon across side j. The generators are named after the standard surface-group relator
a1 b1 a1⁻¹ b1⁻¹ a2 b2 a2⁻¹ b2⁻¹, with upper-case names denoting inverses.
"""

import math
from enum import Enum

import numpy as np

SIDE_COUNT = 8
GENUS = 2

# Center-to-side-midpoint distance; also half the side length and half the translation length
INRADIUS = math.acosh(1.0 + math.sqrt(2.0))
TRANSLATION_LENGTH = 2.0 * INRADIUS
# Center-to-vertex distance
CIRCUMRADIUS = math.acosh((1.0 + math.sqrt(2.0)) ** 2)

DOMAIN_AREA = 4.0 * math.pi * (GENUS - 1)
FIBER_LENGTH = 2.0 * math.pi
UNIT_TANGENT_VOLUME = DOMAIN_AREA * FIBER_LENGTH

SIDE_ANGLES = tuple(j * math.pi / 4.0 for j in range(SIDE_COUNT))

MAX_REDUCTION_STEPS = 10_000
MAX_FLOW_TIME = 500.0
DETERMINANT_TOLERANCE = 1e-9


class GeneratorName(str, Enum):
    """
    Surface-group generators and their inverses.

    Lower-case names are the generators, upper-case names their inverses:
    - GeneratorName.A1.inverse -> GeneratorName.A1_INV
    - GeneratorName("B2") -> GeneratorName.B2_INV
    """

    A1 = "a1"
    B1 = "b1"
    A2 = "a2"
    B2 = "b2"
    A1_INV = "A1"
    B1_INV = "B1"
    A2_INV = "A2"
    B2_INV = "B2"

    @property
    def position(self) -> int:
        """Position in GENERATOR_ORDER (0-3 generators, 4-7 inverses)."""
        return GENERATOR_ORDER.index(self)

    @property
    def inverse(self) -> "GeneratorName":
        return GENERATOR_ORDER[(self.position + 4) % 8]

    @property
    def homology(self) -> np.ndarray:
        """Image in the first homology group Z^4."""
        return HOMOLOGY_IMAGES[self.position].copy()


GENERATOR_ORDER = tuple(GeneratorName)

# Rows follow GENERATOR_ORDER; the generator basis is (a1, b1, a2, b2)
HOMOLOGY_IMAGES = np.vstack([np.eye(4, dtype=np.int64), -np.eye(4, dtype=np.int64)])
HOMOLOGY_IMAGES.setflags(write=False)

# Side j -> the generator mapping the octagon across side j
SIDE_GENERATORS = {
    0: GeneratorName.A1,
    1: GeneratorName.B1_INV,
    2: GeneratorName.A1_INV,
    3: GeneratorName.B1,
    4: GeneratorName.A2,
    5: GeneratorName.B2_INV,
    6: GeneratorName.A2_INV,
    7: GeneratorName.B2,
}

# Side j is glued to side PAIRED_SIDE[j]; SIDE_GENERATORS[j] maps PAIRED_SIDE[j] onto j
PAIRED_SIDE = {0: 2, 2: 0, 1: 3, 3: 1, 4: 6, 6: 4, 5: 7, 7: 5}

RELATOR = (
    GeneratorName.A1,
    GeneratorName.B1,
    GeneratorName.A1_INV,
    GeneratorName.B1_INV,
    GeneratorName.A2,
    GeneratorName.B2,
    GeneratorName.A2_INV,
    GeneratorName.B2_INV,
)
