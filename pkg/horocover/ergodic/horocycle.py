"""
Long horocycle integrals on the cover.

The orbit h_s(x), s ∈ [0, T], is cut into unit chunks. Chunk starts are produced a block at a time from
the reduced block start and reduced in one batch, which keeps every matrix O(1) while tracking the deck
coordinate of each chunk. A chunk is only integrated if it passes within reach of some lifted bump copy;
the observable is then evaluated directly as Σ_γ c_{deck + [γ]}·b(γ⁻¹p) over the nearby group elements γ,
so no per-node reduction is needed.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from horocover.cover import CoverPoint, ZdCover, flow_batch_with_winding, flow_with_winding
from horocover.errors import StepTooCoarse
from horocover.geometry import CIRCUMRADIUS, distance_batch, reduce_batch
from horocover.geometry.models import horocycle_batch, inverse_batch
from horocover.renorm import ConstantCurvature, CurvatureModel
from horocover.renorm.quadrature import gauss_legendre_nodes, panel_count
from horocover.twist.observables import BaseBump, ConstantObservable, CoverObservable, SurfaceObservable

from .window import DEFAULT_DELTA, SmoothingWindow

logger = logging.getLogger(__name__)

CHUNK_LENGTH = 1.0
BLOCK_CHUNKS = 256
# Panel length relative to the bump radius
MAX_STEP_RATIO = 1.0 / 8.0

Observable = CoverObservable | SurfaceObservable | ConstantObservable
Weight = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class HorocycleIntegral:
    """∫₀ᵀ f∘h_s(x)·w(s) ds with its step-doubling error estimate, also at intermediate breakpoints."""

    length: float
    value: float
    error: float
    breakpoints: np.ndarray = field(repr=False, compare=False)
    values: np.ndarray = field(repr=False, compare=False)
    errors: np.ndarray = field(repr=False, compare=False)
    flagged_chunks: int = 0

    def at(self, T: float) -> tuple[float, float]:
        """(integral, error) up to breakpoint T."""
        index = int(np.searchsorted(self.breakpoints, T))
        if index >= self.breakpoints.size or not math.isclose(self.breakpoints[index], T, rel_tol=1e-12):
            raise KeyError(f"T = {T} is not a breakpoint of this integral")
        return float(self.values[index]), float(self.errors[index])


class BumpNeighborhood:
    """
    Group elements whose copy of the bump can come within reach of a chunk starting in the domain.

    A chunk of length L stays within 2·asinh(L/2) of its start, so a copy γ·c matters only when
    d(start, γc) < radius + 2·asinh(L/2); for starts in the domain this needs
    d(center, γ·center) < circumradius + radius + 2·asinh(L/2) + d(center, c).
    """

    def __init__(self, bump: BaseBump, cover: ZdCover, chunk_length: float = CHUNK_LENGTH):
        self.reach = bump.radius + 2.0 * math.asinh(0.5 * chunk_length)
        radius = CIRCUMRADIUS + self.reach + bump.center_distance
        elements = cover.group.elements_within(radius)
        self.matrices = np.stack([element.matrix.as_array() for element in elements])
        self.inverses = inverse_batch(self.matrices)
        self.decks = cover.abelianization.project(np.array([element.homology for element in elements]))
        self.centers = self.matrices @ bump.center_frame
        logger.debug(f"Bump neighborhood: {len(elements)} group elements within {radius:.3f}")

    def __len__(self) -> int:
        return self.matrices.shape[0]


class _Accumulator:
    """Fine and coarse quadrature sums binned by breakpoint."""

    def __init__(self, marks: np.ndarray, step: float):
        self.marks = marks
        self.fine = np.zeros(marks.size)
        self.coarse = np.zeros(marks.size)
        self.step = step
        panels = panel_count(CHUNK_LENGTH, step)
        self.template = gauss_legendre_nodes(0.0, CHUNK_LENGTH, panels)
        self.coarse_template = gauss_legendre_nodes(0.0, CHUNK_LENGTH, max(1, (panels + 1) // 2))

    def bin_of(self, s: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.marks, s, side="right")

    def add(self, bins: np.ndarray, fine: np.ndarray, coarse: np.ndarray) -> None:
        np.add.at(self.fine, bins, fine)
        np.add.at(self.coarse, bins, coarse)

    def result(self, length: float, flagged: int) -> HorocycleIntegral:
        values = np.cumsum(self.fine)
        errors = np.cumsum(np.abs(self.fine - self.coarse))
        return HorocycleIntegral(length, float(values[-1]), float(errors[-1]), self.marks, values, errors, flagged)


def _evaluate_pairs(
    starts: np.ndarray,
    inverses: np.ndarray,
    coefficients: np.ndarray,
    offsets: np.ndarray,
    nodes: np.ndarray,
    weights: np.ndarray,
    bump: BaseBump,
    weight: Weight | None,
) -> np.ndarray:
    """Σ_nodes w·c·b(γ⁻¹·start·n(u)) for every (start, γ) pair."""
    points = starts[:, None] @ horocycle_batch(nodes)[None]
    values = bump(inverses[:, None] @ points) * coefficients[:, None]
    if weight is not None:
        values = values * weight(offsets[:, None] + nodes[None, :])
    return values @ weights


def _constant_integral(
    f: ConstantObservable, marks: np.ndarray, step: float, weight: Weight | None
) -> HorocycleIntegral:
    if weight is None:
        values = f.value * marks
        return HorocycleIntegral(float(marks[-1]), float(values[-1]), 0.0, marks, values, np.zeros(marks.size))
    edges = np.concatenate([[0.0], marks])
    fine, errors = [], []
    for a, b in zip(edges[:-1], edges[1:], strict=True):
        nodes, weights = gauss_legendre_nodes(a, b, panel_count(b - a, step))
        coarse_nodes, coarse_weights = gauss_legendre_nodes(a, b, max(1, (panel_count(b - a, step) + 1) // 2))
        value = f.value * float(weights @ weight(nodes))
        fine.append(value)
        errors.append(abs(value - f.value * float(coarse_weights @ weight(coarse_nodes))))
    values, errors = np.cumsum(fine), np.cumsum(errors)
    return HorocycleIntegral(float(marks[-1]), float(values[-1]), float(errors[-1]), marks, values, errors)


def horocycle_integral(
    f: Observable,
    x: CoverPoint,
    T: float,
    step: float,
    cover: ZdCover,
    weight: Weight | None = None,
    breakpoints: Sequence[float] | None = None,
) -> HorocycleIntegral:
    """
    ∫₀ᵀ f(h_s x)·w(s) ds by composite Gauss-Legendre quadrature.

    Args:
        f: Cover observable, surface observable or constant
        x: Start point on the cover
        T: Orbit length, T >= 0
        step: Panel length, at most 1/8 of the bump radius
        cover: Cover defining deck coordinates
        weight: Optional vectorized weight w(s)
        breakpoints: Intermediate lengths at which the running integral is also reported

    Returns:
        HorocycleIntegral; its error is |Q_step - Q_2step|

    Raises:
        StepTooCoarse: If step exceeds the bump radius / 8
    """
    if T < 0:
        raise ValueError(f"Orbit length must be non-negative, got {T}")
    if step <= 0:
        raise ValueError(f"Quadrature step must be positive, got {step}")
    marks = np.unique(np.array([*(breakpoints or []), T], dtype=float))
    if marks[0] < 0 or marks[-1] > T:
        raise ValueError(f"Breakpoints must lie in [0, {T}]")
    if T == 0:
        return HorocycleIntegral(0.0, 0.0, 0.0, marks, np.zeros(marks.size), np.zeros(marks.size))
    if isinstance(f, ConstantObservable):
        return _constant_integral(f, marks, step, weight)

    bump = f.bump
    if step > MAX_STEP_RATIO * bump.radius:
        raise StepTooCoarse(
            f"Quadrature step {step} exceeds bump radius / 8 = {MAX_STEP_RATIO * bump.radius:.6g}; "
            f"the bump would be under-resolved"
        )
    neighborhood = BumpNeighborhood(bump, cover)
    accumulator = _Accumulator(marks, step)
    nodes, weights = accumulator.template
    coarse_nodes, coarse_weights = accumulator.coarse_template

    def coefficients(decks: np.ndarray) -> np.ndarray:
        if isinstance(f, CoverObservable):
            return f.coefficients_at(decks)
        return np.ones(decks.shape[0])

    chunk_count = math.ceil(T / CHUNK_LENGTH - 1e-12)
    start = x.base.as_array()
    deck = x.deck_array()
    projection = cover.abelianization.matrix
    flagged = 0

    for first in range(0, chunk_count, BLOCK_CHUNKS):
        size = min(BLOCK_CHUNKS, chunk_count - first)
        offsets = np.arange(size + 1, dtype=float) * CHUNK_LENGTH
        reduced, homology, _ = reduce_batch(start @ horocycle_batch(offsets), cover.group)
        decks = deck - homology @ projection.T
        chunk_starts, chunk_decks = reduced[:size], decks[:size]
        start, deck = reduced[size], decks[size]

        distances = distance_batch(chunk_starts[:, None], neighborhood.centers[None])
        chunk_index, element_index = np.nonzero(distances < neighborhood.reach)
        if chunk_index.size == 0:
            continue
        pair_coefficients = coefficients(chunk_decks[chunk_index] + neighborhood.decks[element_index])
        keep = pair_coefficients != 0.0
        chunk_index, element_index, pair_coefficients = (
            chunk_index[keep],
            element_index[keep],
            pair_coefficients[keep],
        )
        if chunk_index.size == 0:
            continue
        flagged += np.unique(chunk_index).size

        s0 = (first + chunk_index) * CHUNK_LENGTH
        lengths = np.minimum(CHUNK_LENGTH, T - s0)
        next_bins = accumulator.bin_of(s0)
        # A chunk is regular when it is full length and no breakpoint falls strictly inside it
        regular = (lengths == CHUNK_LENGTH) & (marks[np.minimum(next_bins, marks.size - 1)] >= s0 + CHUNK_LENGTH)

        if np.any(regular):
            args = (
                chunk_starts[chunk_index[regular]],
                neighborhood.inverses[element_index[regular]],
                pair_coefficients[regular],
                s0[regular],
            )
            fine = _evaluate_pairs(*args, nodes, weights, bump, weight)
            coarse = _evaluate_pairs(*args, coarse_nodes, coarse_weights, bump, weight)
            accumulator.add(next_bins[regular], fine, coarse)

        for pair in np.flatnonzero(~regular):
            origin = s0[pair]
            inner = marks[(marks > origin) & (marks < origin + lengths[pair])]
            edges = np.concatenate([[origin], inner, [origin + lengths[pair]]])
            for a, b in zip(edges[:-1], edges[1:], strict=True):
                panels = panel_count(b - a, step)
                args = (
                    chunk_starts[chunk_index[pair]][None],
                    neighborhood.inverses[element_index[pair]][None],
                    pair_coefficients[pair : pair + 1],
                    np.array([origin]),
                )
                fine = _evaluate_pairs(*args, *gauss_legendre_nodes(a - origin, b - origin, panels), bump, weight)
                coarse = _evaluate_pairs(
                    *args, *gauss_legendre_nodes(a - origin, b - origin, max(1, (panels + 1) // 2)), bump, weight
                )
                accumulator.add(accumulator.bin_of(np.array([a])), fine, coarse)

    result = accumulator.result(T, flagged)
    logger.debug(
        f"Horocycle integral to T = {T:g}: {result.value:.10g} ± {result.error:.2e} "
        f"({flagged} of {chunk_count} chunks near the support)"
    )
    return result


# ===== Renormalization =====


@dataclass(frozen=True)
class RenormalizedIdentity:
    """Both sides of the change of variables s = e^{t}u on a windowed horocycle arc."""

    T: float
    t: float
    ramp: float
    lhs: float
    lhs_error: float
    rhs: float
    rhs_error: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def tolerance(self) -> float:
        """Combined quadrature error of the two sides."""
        return self.lhs_error + self.rhs_error


def _require_constant(model: CurvatureModel, what: str) -> None:
    if not model.is_constant:
        raise ValueError(f"{what} is only available for the constant curvature model, got {model.describe()}")


def pushed_back_values(
    f: Observable, x_t: CoverPoint, u: np.ndarray, t: float, cover: ZdCover
) -> np.ndarray:
    """f(g_{-t}·h_u(x_t)) at the arc parameters u."""
    reduced, homology, _ = reduce_batch(x_t.base.as_array() @ horocycle_batch(u), cover.group)
    decks = x_t.deck_array() - cover.abelianization.project(homology)
    back, winding, _ = flow_batch_with_winding(reduced, -t, cover)
    return f.evaluate(back, decks + winding)


def renormalized_integral(
    f: Observable,
    x: CoverPoint,
    T: float,
    t: float,
    step: float,
    cover: ZdCover,
    model: CurvatureModel | None = None,
    delta: float = DEFAULT_DELTA,
    ramp: float | None = None,
) -> RenormalizedIdentity:
    """
    Evaluate ∫₀ᵀ f∘h_s(x)·ψ(τ(s,t,x)) ds directly and as e^{t}∫₀^{τ(T,t,x)} (ℒ̂_t f)∘h_u(g_t x)·ψ(u) du.

    With constant curvature τ(s,t,x) = e^{-t}s and ℒ̂_t f = f∘g_{-t}. The two sides use independent
    orbits: the left one follows h_s(x), the right one follows h_u(g_t x) and flows every node back.

    Args:
        f: Observable
        x: Start point
        T: Arc length
        t: Geodesic time, 0 <= t
        step: Panel length of the left side; the right side uses e^{-t}·step
        cover: Cover defining deck coordinates
        model: Curvature model (constant only)
        delta: Window exponent, B = e^{-δt/3}
        ramp: Explicit window ramp B, overriding delta

    Raises:
        ValueError: If the window does not fit on [0, e^{-t}T]
        StepTooCoarse: If step exceeds the bump radius / 8
    """
    _require_constant(model or ConstantCurvature(), "The renormalized integral")
    if t < 0:
        raise ValueError(f"Renormalization time must be non-negative, got {t}")
    length = math.exp(-t) * T
    window = SmoothingWindow(ramp, length) if ramp is not None else SmoothingWindow.for_time(t, length, delta)
    contraction = math.exp(-t)

    lhs = horocycle_integral(f, x, T, step, cover, weight=lambda s: window(contraction * s))

    x_t, _ = flow_with_winding(x, t, cover)
    rhs_step = contraction * step
    panels = panel_count(length, rhs_step)
    fine_nodes, fine_weights = gauss_legendre_nodes(0.0, length, panels)
    coarse_nodes, coarse_weights = gauss_legendre_nodes(0.0, length, max(1, (panels + 1) // 2))
    scale = math.exp(t)
    fine = scale * float(fine_weights @ (pushed_back_values(f, x_t, fine_nodes, t, cover) * window(fine_nodes)))
    coarse = scale * float(
        coarse_weights @ (pushed_back_values(f, x_t, coarse_nodes, t, cover) * window(coarse_nodes))
    )
    result = RenormalizedIdentity(T, t, window.ramp, lhs.value, lhs.error, fine, abs(fine - coarse))
    logger.debug(f"Renormalized identity T = {T:g}, t = {t:g}: residual {result.residual:.3e}")
    return result


def smoothing_error_constant(
    f: Observable,
    x: CoverPoint,
    T: float,
    t: float,
    step: float,
    cover: ZdCover,
    model: CurvatureModel | None = None,
    delta: float = DEFAULT_DELTA,
) -> float:
    """
    Measured constant 𝒞 in |∫ f∘h_s - ∫ f∘h_s·ψ(τ(s,t,x))| ≤ 𝒞·‖f‖_∞·e^{h_top t}·B.

    Returns:
        The ratio of the window error to ‖f‖_∞·e^{t}·B; 0 for f ≡ 0
    """
    _require_constant(model or ConstantCurvature(), "The smoothing error constant")
    length = math.exp(-t) * T
    window = SmoothingWindow.for_time(t, length, delta)
    contraction = math.exp(-t)
    plain = horocycle_integral(f, x, T, step, cover)
    smoothed = horocycle_integral(f, x, T, step, cover, weight=lambda s: window(contraction * s))
    scale = f.sup_norm() * math.exp(t) * window.ramp
    if scale == 0:
        return 0.0
    return abs(plain.value - smoothed.value) / scale
