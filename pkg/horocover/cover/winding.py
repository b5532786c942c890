"""
Deck characters, the combinatorial winding cocycle and orbit windings.

Orbits are flowed in chunks of at most `step` with a domain reduction after every chunk. The homology of
all reduction words applied along the way is the homology of the group element carrying the end tile
back to the base tile, so the deck displacement of the orbit is minus its projection.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np

from horocover.geometry import IsometryMatrix
from horocover.geometry.domain import advance_and_reduce, reduce_with_retry
from horocover.geometry.flows import geodesic_batch, geodesic_step, horocycle_batch_step, horocycle_step

from .models import CoverPoint, TwistParameter, WindingVector, ZdCover

logger = logging.getLogger(__name__)


def _omega_array(omega: TwistParameter | Sequence[float] | np.ndarray) -> np.ndarray:
    if isinstance(omega, TwistParameter):
        return omega.as_array()
    return np.atleast_1d(np.asarray(omega, dtype=float))


def deck_character(omega: TwistParameter | Sequence[float], deck: Sequence[int] | np.ndarray) -> complex | np.ndarray:
    """
    E_ω(D) = exp(2πi ω·D).

    `deck` may be a single vector or an (n, d) stack, in which case an array of n values is returned.
    """
    phase = np.asarray(deck, dtype=float) @ _omega_array(omega)
    value = np.exp(2j * np.pi * phase)
    return complex(value) if np.ndim(value) == 0 else value


def xi_cocycle(omega: TwistParameter | Sequence[float], x: CoverPoint) -> float:
    """ω·deck(x); constant on every copy of the fundamental domain."""
    return float(np.dot(_omega_array(omega), x.deck_array()))


# ===== Single orbits =====


def _check_step(step: float) -> None:
    if not 0.0 < step <= 1.0:
        raise ValueError(f"Chunk step must lie in (0, 1], got {step}")


def _chunked_winding(
    x: CoverPoint,
    duration: float,
    cover: ZdCover,
    step: float,
    advance: Callable[[IsometryMatrix, float], IsometryMatrix],
) -> tuple[CoverPoint, WindingVector]:
    _check_step(step)
    if x.dimension != cover.dimension:
        raise ValueError(f"Cover point has deck dimension {x.dimension}, cover has {cover.dimension}")
    if duration == 0.0:
        return x, WindingVector((0,) * cover.dimension, 0.0, x)

    chunks = math.ceil(abs(duration) / step)
    increment = duration / chunks
    current = x.base
    homology = np.zeros(4, dtype=np.int64)
    for _ in range(chunks):
        current, word = reduce_with_retry(advance(current, increment), cover.group)
        homology += cover.abelianization.homology(word)

    displacement = tuple(int(v) for v in -cover.abelianization.project(homology))
    logger.debug(f"Orbit of length {duration:g} in {chunks} chunks wound by {displacement}")
    end = CoverPoint(current, x.deck).shifted(displacement)
    return end, WindingVector(displacement, duration, x)


def flow_with_winding(
    x: CoverPoint, t: float, cover: ZdCover, step: float = 1.0
) -> tuple[CoverPoint, WindingVector]:
    """
    Flow a cover point along its geodesic and record the deck displacement.

    Args:
        x: Start point
        t: Geodesic time, any sign
        cover: Cover the point lives on
        step: Chunk length in (0, 1]

    Returns:
        (g_t(x), winding) with deck(g_t x) - deck(x) = winding

    Raises:
        NonTermination: If a reduction fails even after the retry
    """
    return _chunked_winding(x, t, cover, step, geodesic_step)


def horocycle_with_winding(
    x: CoverPoint, s: float, cover: ZdCover, step: float = 1.0
) -> tuple[CoverPoint, WindingVector]:
    """Flow a cover point along its stable horocycle and record the deck displacement."""
    return _chunked_winding(x, s, cover, step, horocycle_step)


def frobenius_vector(
    x: CoverPoint,
    t: float,
    cover: ZdCover,
    omegas: Sequence[TwistParameter] | None = None,
    step: float = 1.0,
) -> WindingVector:
    """
    Winding cycle of the geodesic segment of length t from x.

    Component k is the pairing of ω_k with the winding; by default the ω_k are the standard basis,
    so the components are the deck displacement itself.
    """
    if t < 0:
        raise ValueError(f"Winding cycle needs t >= 0, got {t}")
    _, winding = flow_with_winding(x, t, cover, step)
    if omegas is None:
        return WindingVector(tuple(float(v) for v in winding.values), t, x)
    return WindingVector(tuple(winding.pairing(omega) for omega in omegas), t, x)


# ===== Batches =====


def flow_batch_with_winding(
    frames: np.ndarray, t: float, cover: ZdCover, step: float = 1.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Geodesic flow of many frames at once.

    Args:
        frames: Frames of shape (n, 2, 2), in any tile
        t: Geodesic time
        cover: Cover defining the deck coordinates
        step: Chunk length in (0, 1]

    Returns:
        (reduced endpoints, deck displacements (n, d), reduction step counts (n,))
    """
    end, homology, steps = advance_and_reduce(frames, t, cover.group, geodesic_batch, step)
    return end, -cover.abelianization.project(homology), steps


def horocycle_batch_with_winding(
    frames: np.ndarray, s: float, cover: ZdCover, step: float = 1.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stable horocycle flow of many frames at once; see flow_batch_with_winding."""
    end, homology, steps = advance_and_reduce(frames, s, cover.group, horocycle_batch_step, step)
    return end, -cover.abelianization.project(homology), steps
