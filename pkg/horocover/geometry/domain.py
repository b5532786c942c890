"""
Fundamental-domain reduction, domain membership and volume sampling.

Reduction is greedy: apply the generator that most decreases the distance from the basepoint to the
domain center until none does. This terminates for Dirichlet domains; a step budget guards against
floating-point edge cases on the boundary.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np

from horocover.errors import NonTermination

from .constants import CIRCUMRADIUS, GENERATOR_ORDER, HOMOLOGY_IMAGES, INRADIUS, MAX_REDUCTION_STEPS, GeneratorName
from .flows import frame_from_polar
from .models import FuchsianGroup, IsometryMatrix, norm_squared_batch, renormalize_batch

logger = logging.getLogger(__name__)

# Relative decrease of a² + b² + c² + d² that counts as progress
REDUCTION_SLACK = 1e-12
RETRY_PERTURBATION = 1e-12


def reduce_to_domain(
    x: IsometryMatrix, group: FuchsianGroup, max_steps: int = MAX_REDUCTION_STEPS
) -> tuple[IsometryMatrix, tuple[GeneratorName, ...]]:
    """
    Move a frame into the closed fundamental domain.

    Args:
        x: Frame anywhere in T¹H
        group: Surface group whose Dirichlet domain is the target
        max_steps: Step budget

    Returns:
        (reduced frame, generators applied in order); with W the product of the applied generators
        (last one leftmost), reduced = W·x

    Raises:
        NonTermination: If more than `max_steps` steps are needed

    Example:
        >>> group = octagon_group()
        >>> reduce_to_domain(group.generator("a1"), group)[1]
        (<GeneratorName.A1_INV: 'A1'>,)
    """
    current = x.renormalized()
    word: list[GeneratorName] = []
    matrices = group.matrices
    for _ in range(max_steps):
        norm = current.norm_squared
        candidates = matrices @ current.as_array()
        norms = norm_squared_batch(candidates)
        best = int(np.argmin(norms))
        if norms[best] >= norm - REDUCTION_SLACK * norm:
            return current, tuple(word)
        current = IsometryMatrix.from_array(renormalize_batch(candidates[best]))
        word.append(GENERATOR_ORDER[best])

    raise NonTermination(
        f"Domain reduction needed more than {max_steps} steps (basepoint {x.basepoint}, "
        f"remaining distance {math.acosh(max(1.0, 0.5 * current.norm_squared)):.3e})"
    )


def reduce_with_retry(x: IsometryMatrix, group: FuchsianGroup) -> tuple[IsometryMatrix, tuple[GeneratorName, ...]]:
    """Reduce, perturbing the frame by 1e-12 and retrying once on NonTermination."""
    try:
        return reduce_to_domain(x, group)
    except NonTermination:
        logger.warning(f"Reduction stalled for {x!r}; retrying after a {RETRY_PERTURBATION:g} perturbation")
        nudged = x @ IsometryMatrix.geodesic(RETRY_PERTURBATION) @ IsometryMatrix.horocycle(RETRY_PERTURBATION)
        return reduce_to_domain(nudged, group)


def _reduce_stack(
    frames: np.ndarray, group: FuchsianGroup, max_steps: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Greedy reduction of (n, 2, 2) frames; also returns the indices still moving after `max_steps`."""
    reduced = renormalize_batch(frames.copy())
    n = reduced.shape[0]
    homology = np.zeros((n, 4), dtype=np.int64)
    steps = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    matrices = group.matrices

    for _ in range(max_steps):
        if active.size == 0:
            break
        current = reduced[active]
        candidates = np.einsum("gij,njk->ngik", matrices, current)
        norms = norm_squared_batch(candidates)
        best = np.argmin(norms, axis=1)
        best_norm = norms[np.arange(active.size), best]
        current_norm = norm_squared_batch(current)
        improving = best_norm < current_norm - REDUCTION_SLACK * current_norm
        chosen = best[improving]
        moved = active[improving]
        reduced[moved] = renormalize_batch(candidates[improving, chosen])
        homology[moved] += HOMOLOGY_IMAGES[chosen]
        steps[moved] += 1
        active = moved
    return reduced, homology, steps, active


def reduce_batch(
    x: np.ndarray, group: FuchsianGroup, max_steps: int = MAX_REDUCTION_STEPS
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Reduce a stack of frames at once.

    Frames still moving after `max_steps` are perturbed by 1e-12 along the geodesic and the horocycle
    and reduced once more from their input position.

    Args:
        x: Frames of shape (n, 2, 2)
        group: Surface group
        max_steps: Step budget per frame

    Returns:
        (reduced frames, homology of the applied words with shape (n, 4), step counts)

    Raises:
        NonTermination: If any frame exceeds the step budget on the retry too
    """
    frames = np.array(x, dtype=float, copy=True).reshape(-1, 2, 2)
    reduced, homology, steps, stalled = _reduce_stack(frames, group, max_steps)
    if stalled.size == 0:
        return reduced, homology, steps

    logger.warning(
        f"Reduction stalled for {stalled.size} of {frames.shape[0]} frames; "
        f"retrying after a {RETRY_PERTURBATION:g} perturbation"
    )
    nudge = (IsometryMatrix.geodesic(RETRY_PERTURBATION) @ IsometryMatrix.horocycle(RETRY_PERTURBATION)).as_array()
    retried, retried_homology, retried_steps, still = _reduce_stack(frames[stalled] @ nudge, group, max_steps)
    if still.size:
        raise NonTermination(
            f"{still.size} frames needed more than {max_steps} reduction steps, "
            f"also after a {RETRY_PERTURBATION:g} perturbation"
        )
    reduced[stalled] = retried
    homology[stalled] = retried_homology
    steps[stalled] = retried_steps
    return reduced, homology, steps


def advance_and_reduce(
    x: np.ndarray,
    duration: float,
    group: FuchsianGroup,
    advance: Callable[[np.ndarray, float], np.ndarray],
    step: float = 1.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Flow a stack of frames in chunks of at most `step`, reducing after every chunk.

    Args:
        x: Frames of shape (n, 2, 2)
        duration: Total flow time, any sign
        group: Surface group
        advance: Batch flow (frames, time) -> frames, e.g. geodesic_batch
        step: Chunk length in (0, 1]

    Returns:
        (reduced endpoints, summed homology of all reduction words (n, 4), reduction step counts)
    """
    if not 0.0 < step <= 1.0:
        raise ValueError(f"Chunk step must lie in (0, 1], got {step}")
    current = np.asarray(x, dtype=float).reshape(-1, 2, 2)
    n = current.shape[0]
    homology = np.zeros((n, 4), dtype=np.int64)
    steps = np.zeros(n, dtype=np.int64)
    if duration == 0.0:
        return current.copy(), homology, steps

    chunks = math.ceil(abs(duration) / step)
    increment = duration / chunks
    for _ in range(chunks):
        current, chunk_homology, chunk_steps = reduce_batch(advance(current, increment), group)
        homology += chunk_homology
        steps += chunk_steps
    logger.debug(f"Flowed {n} frames for {duration:g} in {chunks} chunks, {int(steps.sum())} reduction steps")
    return current, homology, steps


def in_domain(x: np.ndarray, group: FuchsianGroup, tolerance: float = 1e-9) -> np.ndarray:
    """Boolean mask of frames whose basepoint lies in the closed fundamental domain."""
    x = np.asarray(x).reshape(-1, 2, 2)
    norms = norm_squared_batch(np.einsum("gij,njk->ngik", group.matrices, x))
    own = norm_squared_batch(x)
    return np.all(norms >= own[:, None] * (1.0 - tolerance), axis=1)


def sample_disk_frames(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """Frames uniform for the Liouville measure over the hyperbolic disk of `radius` around the center."""
    u = rng.random(n)
    rho = np.arccosh(1.0 + u * (math.cosh(radius) - 1.0))
    direction = rng.random(n) * 2.0 * np.pi
    fiber = rng.random(n) * 2.0 * np.pi
    return frame_from_polar(rho, direction, fiber)


def sample_domain_frames(rng: np.random.Generator, n: int, group: FuchsianGroup) -> np.ndarray:
    """
    Volume-random frames of M = T¹S, represented in the fundamental domain.

    Rejection sampling from the circumscribed hyperbolic disk; the acceptance rate is about 41%.
    """
    accepted: list[np.ndarray] = []
    count = 0
    while count < n:
        batch = sample_disk_frames(rng, max(64, 3 * (n - count)), CIRCUMRADIUS)
        keep = batch[in_domain(batch, group, tolerance=0.0)]
        accepted.append(keep)
        count += keep.shape[0]
    return np.concatenate(accepted)[:n]


def center_profile(x: np.ndarray) -> np.ndarray:
    """
    Smooth function of the distance to the domain center, supported in the inscribed disk.

    Evaluated on reduced frames it is invariant under the surface group, hence a smooth function on M:
    cos⁴(π d / (2·inradius)) for d < inradius, else 0.
    """
    distance = np.arccosh(np.maximum(1.0, 0.5 * norm_squared_batch(np.asarray(x))))
    ratio = np.minimum(distance / INRADIUS, 1.0)
    return np.cos(0.5 * np.pi * ratio) ** 4
