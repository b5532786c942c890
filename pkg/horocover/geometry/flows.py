"""
Geodesic and horocycle flows on T¹H as right multiplications.

- geodesic flow g_t: x ↦ x·a_t with a_t = diag(e^{t/2}, e^{-t/2})
- stable horocycle flow h_s: x ↦ x·n_s with n_s = [[1, s], [0, 1]], so that a_{-t}·n_s·a_t = n_{s e^{-t}}
- unstable horocycle flow: x ↦ x·[[1, 0], [s, 1]], expanded by the geodesic flow

Every step renormalizes the determinant; flows longer than MAX_FLOW_TIME per call must be chunked.
"""

from __future__ import annotations

import math

import numpy as np

from .constants import MAX_FLOW_TIME
from .models import (
    IsometryMatrix,
    geodesic_array,
    horocycle_batch,
    inverse_batch,
    norm_squared_batch,
    renormalize_batch,
)


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"Flow time must be finite, got {t}")
    if abs(t) > MAX_FLOW_TIME:
        raise ValueError(f"Flow time {t} exceeds {MAX_FLOW_TIME} per call; chunk longer flows")
    return t


def geodesic_step(x: IsometryMatrix, t: float) -> IsometryMatrix:
    """
    Flow `x` along its geodesic for time `t`.

    Args:
        x: Frame to move
        t: Geodesic time, |t| <= 500

    Returns:
        x·a_t with unit determinant

    Example:
        >>> y = geodesic_step(IsometryMatrix.identity(), 1.0)
        >>> round(hyperbolic_distance(IsometryMatrix.identity(), y), 12)
        1.0
    """
    t = _check_time(t)
    return (x @ IsometryMatrix.geodesic(t)).renormalized()


def horocycle_step(x: IsometryMatrix, s: float) -> IsometryMatrix:
    """Flow `x` along its stable horocycle for time `s`."""
    s = _check_time(s)
    return (x @ IsometryMatrix.horocycle(s)).renormalized()


def unstable_horocycle_step(x: IsometryMatrix, s: float) -> IsometryMatrix:
    """Flow `x` along its unstable horocycle for time `s`."""
    s = _check_time(s)
    return (x @ IsometryMatrix.unstable_horocycle(s)).renormalized()


# ===== Batch flows =====


def geodesic_batch(x: np.ndarray, t: float) -> np.ndarray:
    """Apply g_t to a stack of frames of shape (n, 2, 2)."""
    t = _check_time(t)
    return renormalize_batch(np.asarray(x) @ geodesic_array(t))


def horocycle_batch_step(x: np.ndarray, s: np.ndarray | float) -> np.ndarray:
    """Apply h_s to a stack of frames; `s` is a scalar or one time per frame."""
    s = np.broadcast_to(np.asarray(s, dtype=float), np.asarray(x).shape[:-2])
    if np.any(np.abs(s) > MAX_FLOW_TIME):
        raise ValueError(f"Horocycle time exceeds {MAX_FLOW_TIME} per call; chunk longer flows")
    return renormalize_batch(np.asarray(x) @ horocycle_batch(s))


# ===== Metric and coordinates =====


def hyperbolic_distance(x: IsometryMatrix, y: IsometryMatrix) -> float:
    """Distance between the basepoints of two frames."""
    return math.acosh(max(1.0, 0.5 * (x.inverse() @ y).norm_squared))


def distance_batch(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pairwise (broadcast) distance between basepoints of frame stacks."""
    return np.arccosh(np.maximum(1.0, 0.5 * norm_squared_batch(inverse_batch(np.asarray(x)) @ np.asarray(y))))


def basepoint_batch(x: np.ndarray) -> np.ndarray:
    """Basepoints x·i in the upper half-plane."""
    x = np.asarray(x)
    return (x[..., 0, 0] * 1j + x[..., 0, 1]) / (x[..., 1, 0] * 1j + x[..., 1, 1])


def upper_to_disk(z: np.ndarray | complex) -> np.ndarray | complex:
    """Cayley map from the upper half-plane to the disk, i ↦ 0."""
    return (z - 1j) / (z + 1j)


def disk_to_upper(w: np.ndarray | complex) -> np.ndarray | complex:
    return 1j * (1 + w) / (1 - w)


def frame_coordinates(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Disk-model position and fiber angle of each frame.

    Args:
        x: Frames of shape (..., 2, 2)

    Returns:
        (u, v, theta): disk coordinates w = u + iv of the basepoint and the direction angle
        theta ∈ [0, 2π) of the unit vector in the disk chart
    """
    x = np.asarray(x)
    z = basepoint_batch(x)
    w = upper_to_disk(z)
    # Pushforward of the upward vector at i, then through the Cayley map
    tangent = 1j / (x[..., 1, 0] * 1j + x[..., 1, 1]) ** 2
    tangent = tangent * 2j / (z + 1j) ** 2
    theta = np.mod(np.angle(tangent), 2.0 * np.pi)
    return w.real, w.imag, theta


def frame_from_polar(radius: np.ndarray, direction: np.ndarray, fiber: np.ndarray) -> np.ndarray:
    """
    Frames with basepoint at hyperbolic polar coordinates (radius, direction) around the disk center.

    The frame is K(direction)·a_radius·K(fiber), so `fiber` is the angle of the unit vector measured
    from the outward radial direction.
    """
    radius, direction, fiber = np.broadcast_arrays(
        np.asarray(radius, dtype=float), np.asarray(direction, dtype=float), np.asarray(fiber, dtype=float)
    )
    k1 = _rotation_stack(direction)
    a = np.zeros(radius.shape + (2, 2))
    a[..., 0, 0] = np.exp(0.5 * radius)
    a[..., 1, 1] = np.exp(-0.5 * radius)
    k2 = _rotation_stack(fiber)
    return renormalize_batch(k1 @ a @ k2)


def _rotation_stack(angle: np.ndarray) -> np.ndarray:
    half = 0.5 * np.asarray(angle, dtype=float)
    out = np.empty(half.shape + (2, 2))
    out[..., 0, 0] = np.cos(half)
    out[..., 0, 1] = np.sin(half)
    out[..., 1, 0] = -np.sin(half)
    out[..., 1, 1] = np.cos(half)
    return out


def frame_from_disk(u: np.ndarray, v: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Inverse of frame_coordinates: frames with basepoint u + iv in the disk and direction angle theta."""
    w = np.asarray(u, dtype=float) + 1j * np.asarray(v, dtype=float)
    radius = 2.0 * np.arctanh(np.abs(w))
    direction = np.angle(w)
    return frame_from_polar(radius, direction, np.asarray(theta, dtype=float) - direction)
