"""Checks: exactness of the group, the flows and the deck bookkeeping."""

import logging
import math

import numpy as np
import pandas as pd
from scipy import stats

from horocover.cover import ZdCover, flow_batch_with_winding
from horocover.geometry import (
    CIRCUMRADIUS,
    FuchsianGroup,
    advance_and_reduce,
    frame_coordinates,
    frame_from_disk,
    geodesic_batch,
    in_domain,
    reduce_batch,
    sample_disk_frames,
    sample_domain_frames,
)
from horocover.geometry.models import determinant_batch

from .models import Verdict, verdict

logger = logging.getLogger(__name__)

RELATION_TOLERANCE = 1e-8
COMMUTATION_TOLERANCE = 1e-12
DRIFT_TOLERANCE = 1e-8
# Group elements used to move sample frames off the base tile
SHIFT_RADIUS = 3.0
# Uniform frames in a disk of this radius must fill every cell of a 32×32 grid over the domain
TILING_SAMPLES = 100_000
TILING_RADIUS = 6.0
COVERAGE_GRID = 32
# Word-length slope bounds, in units of 1/diameter
GROWTH_RANGE = (0.5, 4.0)


def evaluate_relation(group: FuchsianGroup) -> Verdict:
    """Surface relation and side pairing residuals."""
    relation = group.relation_residual()
    pairing = group.side_pairing_residual()
    worst = max(relation, pairing)
    return verdict(
        "relation",
        worst <= RELATION_TOLERANCE,
        f"Relation residual {relation:.3e}, side pairing residual {pairing:.3e} (tolerance {RELATION_TOLERANCE:g})",
        relation_residual=f"{relation:.6e}",
        pairing_residual=f"{pairing:.6e}",
    )


def evaluate_flow_deck_commutation(cover: ZdCover, rng: np.random.Generator, n: int) -> Verdict:
    """
    g_t commutes with deck translations on random (x, t, γ) triples.

    The frames γx and x flowed for time t must differ by γ exactly, and the winding recorded from
    the copy γx must be the winding from x plus the deck class of γ.
    """
    elements = cover.group.elements_within(SHIFT_RADIUS)
    frames = sample_domain_frames(rng, n, cover.group)
    times = rng.uniform(-5.0, 5.0, n)
    chosen = rng.integers(0, len(elements), n)
    gammas = np.stack([elements[k].matrix.as_array() for k in chosen])
    shifts = cover.abelianization.project(np.array([elements[k].homology for k in chosen]))

    moved = gammas @ frames
    matrix_residual = 0.0
    deck_mismatch = 0
    for k in range(n):
        flowed_copy = geodesic_batch(moved[k : k + 1], times[k])[0]
        copy_of_flow = gammas[k] @ geodesic_batch(frames[k : k + 1], times[k])[0]
        scale = max(1.0, float(np.max(np.abs(copy_of_flow))))
        matrix_residual = max(matrix_residual, float(np.max(np.abs(flowed_copy - copy_of_flow))) / scale)
        _, from_copy, _ = flow_batch_with_winding(moved[k : k + 1], times[k], cover)
        _, from_base, _ = flow_batch_with_winding(frames[k : k + 1], times[k], cover)
        if not np.array_equal(from_copy[0] - shifts[k], from_base[0]):
            deck_mismatch += 1
    logger.debug(f"Flow/deck commutation over {n} triples: residual {matrix_residual:.3e}, {deck_mismatch} mismatches")
    return verdict(
        "flow_deck_commutation",
        matrix_residual <= COMMUTATION_TOLERANCE and deck_mismatch == 0,
        f"Max relative residual {matrix_residual:.3e} over {n} triples, {deck_mismatch} deck mismatches",
        residual=f"{matrix_residual:.6e}",
        deck_mismatches=deck_mismatch,
    )


def evaluate_determinant_drift(group: FuchsianGroup, rng: np.random.Generator, frames: int, steps: int) -> Verdict:
    """Largest |det - 1| after `steps` unit geodesic steps with reduction, on `frames` frames at once."""
    start = sample_domain_frames(rng, frames, group)
    end, _, _ = advance_and_reduce(start, float(steps), group, geodesic_batch)
    drift = float(np.max(np.abs(determinant_batch(end) - 1.0)))
    return verdict(
        "determinant_drift",
        drift <= DRIFT_TOLERANCE,
        f"Determinant drift {drift:.3e} after {frames * steps} steps (tolerance {DRIFT_TOLERANCE:g})",
        drift=f"{drift:.6e}",
        steps=frames * steps,
    )


def evaluate_tiling(
    group: FuchsianGroup,
    rng: np.random.Generator,
    n: int = TILING_SAMPLES,
    radius: float = TILING_RADIUS,
    grid: int = COVERAGE_GRID,
) -> Verdict:
    """
    Uniform frames of a large disk reduce into the domain and fill it.

    The disk-model square circumscribing the domain is cut into grid×grid cells; every cell whose
    center lies in the domain must receive at least one reduced frame.
    """
    reduced, _, _ = reduce_batch(sample_disk_frames(rng, n, radius), group)
    outside = int(np.sum(~in_domain(reduced, group)))
    u, v, _ = frame_coordinates(reduced)
    edge = math.tanh(0.5 * CIRCUMRADIUS)
    counts, _, _ = np.histogram2d(u, v, bins=grid, range=[[-edge, edge], [-edge, edge]])
    centers = (np.arange(grid) + 0.5) * (2.0 * edge / grid) - edge
    cu, cv = np.meshgrid(centers, centers, indexing="ij")
    wanted = in_domain(frame_from_disk(cu.ravel(), cv.ravel(), np.zeros(grid * grid)), group, tolerance=0.0)
    empty = int(np.sum(wanted & (counts.ravel() == 0)))
    logger.debug(f"Tiling: {n} frames from radius {radius:g}, {int(wanted.sum())} domain cells, {empty} empty")
    return verdict(
        "tiling",
        outside == 0 and empty == 0,
        f"{outside} of {n} reduced frames outside the domain; {empty} of {int(wanted.sum())} domain cells "
        f"of the {grid}×{grid} grid empty",
        outside=outside,
        empty_cells=empty,
    )


def reduction_growth(group: FuchsianGroup, rng: np.random.Generator, n: int, t_max: int) -> pd.DataFrame:
    """Mean accumulated reduction-word length of n random geodesic orbits at t = 1, ..., t_max."""
    current = sample_domain_frames(rng, n, group)
    total = np.zeros(n, dtype=np.int64)
    rows = []
    for t in range(1, t_max + 1):
        current, _, steps = advance_and_reduce(current, 1.0, group, geodesic_batch)
        total += steps
        rows.append({"t": float(t), "word_length": float(total.mean())})
    return pd.DataFrame(rows, columns=["t", "word_length"])


def evaluate_reduction_growth(table: pd.DataFrame) -> Verdict:
    """Word length grows linearly in t with slope in [0.5, 4] / domain diameter."""
    fit = stats.linregress(table["t"], table["word_length"])
    diameter = 2.0 * CIRCUMRADIUS
    lo, hi = GROWTH_RANGE[0] / diameter, GROWTH_RANGE[1] / diameter
    return verdict(
        "reduction_growth",
        lo <= fit.slope <= hi,
        f"Reduction word length grows with slope {fit.slope:.4f} per unit time (r² = {fit.rvalue**2:.4f}); "
        f"admissible [{lo:.4f}, {hi:.4f}]",
        slope=f"{fit.slope:.6e}",
        intercept=f"{fit.intercept:.6e}",
        r_squared=f"{fit.rvalue**2:.6f}",
    )
