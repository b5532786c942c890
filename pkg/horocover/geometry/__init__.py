"""Constant-curvature model of the unit tangent bundle of the genus-2 octagon surface."""

from .constants import (
    CIRCUMRADIUS,
    GENERATOR_ORDER,
    HOMOLOGY_IMAGES,
    INRADIUS,
    RELATOR,
    UNIT_TANGENT_VOLUME,
    GeneratorName,
)
from .domain import (
    advance_and_reduce,
    center_profile,
    in_domain,
    reduce_batch,
    reduce_to_domain,
    reduce_with_retry,
    sample_disk_frames,
    sample_domain_frames,
)
from .flows import (
    basepoint_batch,
    distance_batch,
    frame_coordinates,
    frame_from_disk,
    frame_from_polar,
    geodesic_batch,
    geodesic_step,
    horocycle_batch_step,
    horocycle_step,
    hyperbolic_distance,
    unstable_horocycle_step,
)
from .models import FuchsianGroup, GroupElement, IsometryMatrix, free_reduce, invert_word, octagon_group

__all__ = [
    "CIRCUMRADIUS",
    "GENERATOR_ORDER",
    "HOMOLOGY_IMAGES",
    "INRADIUS",
    "RELATOR",
    "UNIT_TANGENT_VOLUME",
    "GeneratorName",
    "IsometryMatrix",
    "GroupElement",
    "FuchsianGroup",
    "octagon_group",
    "free_reduce",
    "invert_word",
    "geodesic_step",
    "horocycle_step",
    "unstable_horocycle_step",
    "geodesic_batch",
    "horocycle_batch_step",
    "hyperbolic_distance",
    "distance_batch",
    "basepoint_batch",
    "frame_coordinates",
    "frame_from_disk",
    "frame_from_polar",
    "advance_and_reduce",
    "reduce_to_domain",
    "reduce_with_retry",
    "reduce_batch",
    "in_domain",
    "sample_disk_frames",
    "sample_domain_frames",
    "center_profile",
]
