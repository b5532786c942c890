"""
Topological entropy from the growth of renormalized horocycle arcs.

τ(S, t, x)/S → e^{-h_top t} for long arcs, so the slope of -log τ(S, t, x) in t estimates h_top on each
orbit; the estimate is the mean slope over volume-random orbits with its standard error.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import stats

from horocover.geometry import FuchsianGroup, IsometryMatrix, octagon_group, sample_domain_frames
from horocover.renorm import CurvatureModel, tau
from horocover.utils import seed_streams

logger = logging.getLogger(__name__)

DEFAULT_TIMES = (2.0, 4.0, 6.0, 8.0)
DEFAULT_ARC = 20.0
DEFAULT_ORBITS = 8


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    standard_error: float
    orbits: int


def estimate_entropy(
    model: CurvatureModel,
    seed: int,
    orbits: int = DEFAULT_ORBITS,
    times: Sequence[float] = DEFAULT_TIMES,
    arc_length: float = DEFAULT_ARC,
    step: float = 0.05,
    group: FuchsianGroup | None = None,
) -> EntropyEstimate:
    """
    Estimate h_top; the constant model returns exactly 1.

    Args:
        model: Curvature model
        seed: Master seed; orbit starts come from stream (seed, 0)
        orbits: Number of volume-random orbits
        times: Geodesic times of the regression, at least two
        arc_length: Horocycle arc length S
        step: τ quadrature step
        group: Surface group

    Returns:
        EntropyEstimate
    """
    if model.is_constant:
        return EntropyEstimate(1.0, 0.0, 0)
    if len(times) < 2:
        raise ValueError(f"Entropy regression needs at least two times, got {list(times)}")
    if orbits < 2:
        raise ValueError(f"Entropy estimate needs at least two orbits, got {orbits}")
    group = group or octagon_group()
    starts = sample_domain_frames(seed_streams(seed, 0), orbits, group)
    slopes = []
    for frame in starts:
        x = IsometryMatrix.from_array(frame)
        logs = [-math.log(tau(model, x, arc_length, t, step, group, method="quadrature").tau) for t in times]
        slopes.append(stats.linregress(np.asarray(times, dtype=float), logs).slope)
    slopes = np.asarray(slopes)
    estimate = EntropyEstimate(float(slopes.mean()), float(slopes.std(ddof=1) / math.sqrt(orbits)), orbits)
    logger.info(f"h_top ≈ {estimate.value:.4f} ± {estimate.standard_error:.4f} over {orbits} orbits")
    return estimate
