"""
Renormalization time τ(s, t, x) and the normalizing time t★(x, T).

g_t ∘ h_s(x) = h_{τ(s,t,x)} ∘ g_t(x), and ∂τ/∂s = J_t(h_s x), so τ is the integral of the Jacobi field along
the horocycle arc. Only the base frame enters: τ is the same on every copy of the fundamental domain.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from horocover.cover import CoverPoint
from horocover.errors import BracketFailure
from horocover.geometry import FuchsianGroup, IsometryMatrix, octagon_group, reduce_batch
from horocover.geometry.models import horocycle_batch

from .curvature import CurvatureModel
from .jacobi import jacobi_at_frames
from .quadrature import gauss_legendre_nodes, panel_count

logger = logging.getLogger(__name__)

DEFAULT_STEP = 0.05
MAX_STEP = 0.1
BISECTION_TOLERANCE = 1e-10
BRACKET_WIDENING = 0.05


@dataclass(frozen=True)
class RenormRecord:
    """τ(s, t, x) with its quadrature error and the Jacobi field sampled along the arc."""

    s: float
    t: float
    tau: float
    error: float
    nodes: np.ndarray = field(repr=False, compare=False)
    jacobi: np.ndarray = field(repr=False, compare=False)


def _base(x: CoverPoint | IsometryMatrix) -> IsometryMatrix:
    return x.base if isinstance(x, CoverPoint) else x


class HorocycleArc:
    """
    Gauss-Legendre nodes along h_s(x), s ∈ [0, length], with their domain-reduced frames.

    The fine rule uses panels of length `step`; a coarse rule with twice the panel length backs the
    error estimate.
    """

    def __init__(self, x: IsometryMatrix, length: float, step: float, group: FuchsianGroup):
        self.length = float(length)
        panels = panel_count(length, step)
        self.nodes, self.weights = gauss_legendre_nodes(0.0, length, panels)
        self.coarse_nodes, self.coarse_weights = gauss_legendre_nodes(0.0, length, max(1, (panels + 1) // 2))
        all_nodes = np.concatenate([self.nodes, self.coarse_nodes])
        self.frames, _, _ = reduce_batch(x.as_array() @ horocycle_batch(all_nodes), group)
        self._split = self.nodes.size
        self.group = group

    def jacobi(self, model: CurvatureModel, t: float) -> tuple[np.ndarray, np.ndarray]:
        values = jacobi_at_frames(model, self.frames, t, self.group)
        return values[: self._split], values[self._split :]

    def integrate(self, model: CurvatureModel, t: float) -> tuple[float, float, np.ndarray]:
        """(τ, error estimate, J at the fine nodes)."""
        fine, coarse = self.jacobi(model, t)
        value = float(np.dot(self.weights, fine))
        error = abs(value - float(np.dot(self.coarse_weights, coarse)))
        return value, error, fine


def tau(
    model: CurvatureModel,
    x: CoverPoint | IsometryMatrix,
    s: float,
    t: float,
    step: float = DEFAULT_STEP,
    group: FuchsianGroup | None = None,
    method: str = "auto",
) -> RenormRecord:
    """
    Renormalization time of the horocycle arc of length s under the geodesic flow for time t.

    Args:
        model: Curvature model
        x: Start of the arc; its deck coordinate is ignored
        s: Arc length, any sign
        t: Geodesic time, any sign
        step: Quadrature panel length, at most 0.1 (clamped to |s|)
        group: Surface group (default: the octagon group)
        method: "auto" uses e^{-t}s for the constant model, "quadrature" always integrates J

    Returns:
        RenormRecord

    Example:
        >>> tau(ConstantCurvature(), IsometryMatrix.identity(), 1.0, 1.0).tau == math.exp(-1.0)
        True
    """
    if not 0.0 < step <= MAX_STEP:
        raise ValueError(f"Quadrature step must lie in (0, {MAX_STEP}], got {step}")
    if method not in ("auto", "quadrature"):
        raise ValueError(f"Unknown method '{method}'. Available methods: auto, quadrature")
    if s == 0.0:
        return RenormRecord(0.0, t, 0.0, 0.0, np.zeros(0), np.zeros(0))
    if model.is_constant and method == "auto":
        factor = math.exp(-t)
        return RenormRecord(s, t, factor * s, 0.0, np.array([0.0, s]), np.array([factor, factor]))

    arc = HorocycleArc(_base(x), s, min(step, abs(s)), group or octagon_group())
    value, error, jacobi = arc.integrate(model, t)
    return RenormRecord(s, t, value, error, arc.nodes, jacobi)


def normalizing_time(
    model: CurvatureModel,
    x: CoverPoint | IsometryMatrix,
    T: float,
    step: float = DEFAULT_STEP,
    group: FuchsianGroup | None = None,
    max_time: float | None = None,
) -> float:
    """
    Geodesic time t★ renormalizing the horocycle arc of length T to unit length: τ(T, t★, x) = 1.

    Args:
        model: Curvature model
        x: Start of the arc
        T: Arc length, T >= 1
        step: Quadrature panel length
        group: Surface group
        max_time: Largest admissible t★ (default 2·log T / h_top + 50)

    Returns:
        log T for the constant model, the bisection root otherwise

    Raises:
        BracketFailure: If no sign change is found inside [0, max_time]
    """
    if T < 1:
        raise ValueError(f"Normalizing time needs T >= 1, got {T}")
    if T == 1:
        return 0.0
    if model.is_constant:
        return math.log(T)

    log_t = math.log(T)
    limit = 2.0 * log_t / model.h_top + 50.0 if max_time is None else float(max_time)
    lo = log_t / math.sqrt(-model.k_lo) * (1.0 - BRACKET_WIDENING)
    hi = log_t / math.sqrt(-model.k_hi) * (1.0 + BRACKET_WIDENING)
    if hi > limit:
        raise BracketFailure(f"Bracket [{lo:.6g}, {hi:.6g}] for t★ exceeds the admissible range [0, {limit:.6g}]")

    arc = HorocycleArc(_base(x), T, step, group or octagon_group())

    def excess(t: float) -> float:
        fine, _ = arc.jacobi(model, t)
        return float(np.dot(arc.weights, fine)) - 1.0

    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo < 0 or f_hi > 0:
        raise BracketFailure(
            f"No sign change of τ(T, t, x) - 1 on [{lo:.6g}, {hi:.6g}]: values {f_lo:.3e}, {f_hi:.3e}"
        )
    iterations = 0
    while hi - lo > BISECTION_TOLERANCE:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    logger.debug(f"t★ for T = {T:g} after {iterations} bisections: {0.5 * (lo + hi):.12g}")
    return 0.5 * (lo + hi)
