"""Z^d-cover bookkeeping: abelianization, deck coordinates and the winding cocycle."""

from .models import AbelianizationMap, CoverPoint, TwistParameter, WindingVector, ZdCover
from .winding import (
    deck_character,
    flow_batch_with_winding,
    flow_with_winding,
    frobenius_vector,
    horocycle_batch_with_winding,
    horocycle_with_winding,
    xi_cocycle,
)

__all__ = [
    "AbelianizationMap",
    "ZdCover",
    "CoverPoint",
    "TwistParameter",
    "WindingVector",
    "deck_character",
    "xi_cocycle",
    "flow_with_winding",
    "horocycle_with_winding",
    "frobenius_vector",
    "flow_batch_with_winding",
    "horocycle_batch_with_winding",
]
