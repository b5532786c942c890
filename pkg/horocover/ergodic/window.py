"""Smoothing window ψ used to cut off the ends of a renormalized horocycle arc."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_DELTA = 0.3


@dataclass(frozen=True)
class SmoothingWindow:
    """
    C^{1+Lip} ramp on [0, length]: 0 near the ends, 1 on [B, length - B].

    The derivative is a tent of height 4/B on [B/2, B] (and its mirror image at the other end), so
    ψ' has Lipschitz constant exactly (4/B)².
    """

    ramp: float
    length: float

    def __post_init__(self):
        if self.ramp <= 0:
            raise ValueError(f"Window ramp B must be positive, got {self.ramp}")
        if self.length < 2 * self.ramp:
            raise ValueError(f"Window length {self.length} is shorter than twice the ramp {self.ramp}")

    @classmethod
    def for_time(cls, t: float, length: float, delta: float = DEFAULT_DELTA) -> SmoothingWindow:
        """Window with B = e^{-δt/3}."""
        return cls(math.exp(-delta * t / 3.0), length)

    @property
    def derivative_lipschitz(self) -> float:
        return (4.0 / self.ramp) ** 2

    def _rise(self, r: np.ndarray) -> np.ndarray:
        b = self.ramp
        scale = 8.0 / (b * b)
        return np.select(
            [r <= 0.5 * b, r <= 0.75 * b, r <= b],
            [0.0, scale * (r - 0.5 * b) ** 2, 1.0 - scale * (b - r) ** 2],
            default=1.0,
        )

    def __call__(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        inside = (r >= 0) & (r <= self.length)
        values = np.minimum(self._rise(r), self._rise(self.length - r))
        return np.where(inside, values, 0.0)

    def derivative(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        b = self.ramp
        slope = 16.0 / (b * b)

        def rise(q: np.ndarray) -> np.ndarray:
            return np.select(
                [q <= 0.5 * b, q <= 0.75 * b, q <= b], [0.0, slope * (q - 0.5 * b), slope * (b - q)], default=0.0
            )

        return np.where((r >= 0) & (r <= self.length), rise(r) - rise(self.length - r), 0.0)
