"""
Pointwise action of the transfer operators.

    ℒ_t u(x)       = J_{-t}(x)·u(g_{-t}x)
    ℒ^(ω)_t u(x)   = G_{t,ω}(x)·J_{-t}(x)·u(g_{-t}x),   G_{t,ω}(x) = exp(2πi ω·w)

with w the winding of the orbit segment from g_{-t}x to x, i.e. deck(x) - deck(g_{-t}x). The weight
J_{-t}(x) = 1/J_t(g_{-t}x) expands: e^{t} in constant curvature.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np

from horocover.cover import CoverPoint, TwistParameter, ZdCover, flow_batch_with_winding, flow_with_winding
from horocover.renorm import CurvatureModel, jacobi_at_frames

CoverFunction = Callable[[CoverPoint], complex]
BatchFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _omega_array(omega: TwistParameter | Sequence[float]) -> np.ndarray:
    return omega.as_array() if isinstance(omega, TwistParameter) else np.asarray(omega, dtype=float)


def _check_time(t: float) -> None:
    if t < 0:
        raise ValueError(f"Transfer operators are applied for t >= 0, got {t}")


def backward_weight(model: CurvatureModel, x: CoverPoint, t: float, cover: ZdCover) -> float:
    """J_{-t}(x)."""
    if model.is_constant:
        return math.exp(t)
    return float(jacobi_at_frames(model, x.base.as_array(), -t, cover.group)[0])


def transfer_apply(u: CoverFunction, t: float, x: CoverPoint, cover: ZdCover, model: CurvatureModel) -> complex:
    """Untwisted ℒ_t u(x)."""
    _check_time(t)
    if t == 0:
        return complex(u(x))
    back, _ = flow_with_winding(x, -t, cover)
    return backward_weight(model, x, t, cover) * complex(u(back))


def twisted_transfer_apply(
    u: CoverFunction,
    omega: TwistParameter | Sequence[float],
    t: float,
    x: CoverPoint,
    cover: ZdCover,
    model: CurvatureModel,
) -> complex:
    """
    ℒ^(ω)_t u(x).

    Args:
        u: Function on the cover (functions on M simply ignore the deck coordinate)
        omega: Twist
        t: Time, t >= 0
        x: Evaluation point
        cover: Cover defining deck coordinates and windings
        model: Curvature model for the weight J_{-t}

    Returns:
        Complex value, bounded by e^{√(-k_lo)·t}·sup|u|
    """
    _check_time(t)
    if t == 0:
        return complex(u(x))
    back, winding = flow_with_winding(x, -t, cover)
    # winding is deck(g_{-t}x) - deck(x)
    phase = -float(np.dot(_omega_array(omega), winding.as_array()))
    return np.exp(2j * np.pi * phase) * backward_weight(model, x, t, cover) * complex(u(back))


def twisted_transfer_via_frobenius(
    u: CoverFunction,
    omega: TwistParameter | Sequence[float],
    t: float,
    x: CoverPoint,
    cover: ZdCover,
    model: CurvatureModel,
) -> complex:
    """ℒ_t(e^{2πi F_{t,ω}}·u)(x), evaluating the winding cycle forward from g_{-t}x."""
    _check_time(t)

    def weighted(y: CoverPoint) -> complex:
        _, forward = flow_with_winding(y, t, cover)
        return np.exp(2j * np.pi * forward.pairing(_omega_array(omega))) * complex(u(y))

    return transfer_apply(weighted, t, x, cover, model)


def twisted_transfer_batch(
    u: BatchFunction,
    omega: TwistParameter | Sequence[float],
    t: float,
    frames: np.ndarray,
    decks: np.ndarray,
    cover: ZdCover,
    model: CurvatureModel,
) -> np.ndarray:
    """ℒ^(ω)_t u at many reduced frames at once; u takes (frames, decks) arrays."""
    _check_time(t)
    frames = np.asarray(frames, dtype=float).reshape(-1, 2, 2)
    decks = np.asarray(decks, dtype=np.int64).reshape(frames.shape[0], cover.dimension)
    if t == 0:
        return np.asarray(u(frames, decks), dtype=complex)
    back, winding, _ = flow_batch_with_winding(frames, -t, cover)
    if model.is_constant:
        weight = np.full(frames.shape[0], math.exp(t))
    else:
        weight = jacobi_at_frames(model, frames, -t, cover.group)
    phase = -(winding @ _omega_array(omega))
    return np.exp(2j * np.pi * phase) * weight * u(back, decks + winding)
