"""
Curvature models driving the Jacobi field.

The surface geometry is always the constant-curvature octagon; variable curvature enters only through the
curvature seen along an orbit. A sampler assigns each point x of M the orbit curvature
K_x(a) = -(mean + amplitude·sin(frequency·a + phase(x))), with phase(x) = 2π·center_profile(x),
so that it is well defined on M (invariant under the surface group).
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from horocover.geometry import center_profile
from horocover.presets import get_curvature_preset


@dataclass(frozen=True)
class ConstantCurvature:
    """K ≡ -1: every quantity has a closed form."""

    @property
    def is_constant(self) -> bool:
        return True

    @property
    def k_lo(self) -> float:
        return -1.0

    @property
    def k_hi(self) -> float:
        return -1.0

    @property
    def h_top(self) -> float:
        return 1.0

    @property
    def contraction_rate(self) -> float:
        return 1.0

    def phase(self, frames: np.ndarray) -> np.ndarray:
        return np.zeros(np.asarray(frames).shape[:-2])

    def curvature(self, a: np.ndarray | float, phase: np.ndarray | float = 0.0) -> np.ndarray:
        return np.full(np.broadcast(np.asarray(a), np.asarray(phase)).shape, -1.0)

    def orbit_curvature(self, phase: float = 0.0) -> Callable[[float], float]:
        return lambda a: -1.0

    def describe(self) -> str:
        return "constant"


@dataclass(frozen=True)
class SamplerCurvature:
    """
    Sinusoidal orbit curvature with range [k_lo, k_hi] = [-(mean + amplitude), -(mean - amplitude)].

    Args:
        mean: Mean of -K
        amplitude: Oscillation amplitude, below `mean`
        frequency: Angular frequency in orbit time
        entropy: Topological entropy if known (see spectral.entropy); when absent, the contraction
            rate √(-k_hi) stands in for it
    """

    mean: float
    amplitude: float
    frequency: float = 1.0
    entropy: float | None = None

    def __post_init__(self):
        if self.amplitude < 0 or self.frequency <= 0:
            raise ValueError(
                f"Sampler needs amplitude >= 0 and frequency > 0, got {self.amplitude}, {self.frequency}"
            )
        if self.mean - self.amplitude <= 0:
            raise ValueError(f"Sampler curvature must stay negative: mean {self.mean} <= amplitude {self.amplitude}")
        if self.entropy is not None and self.entropy <= 0:
            raise ValueError(f"Entropy must be positive, got {self.entropy}")

    @property
    def is_constant(self) -> bool:
        return False

    @property
    def k_lo(self) -> float:
        return -(self.mean + self.amplitude)

    @property
    def k_hi(self) -> float:
        return -(self.mean - self.amplitude)

    @property
    def contraction_rate(self) -> float:
        """λ = √(-k_hi), the slowest exponential contraction."""
        return math.sqrt(-self.k_hi)

    @property
    def h_top(self) -> float:
        return self.entropy if self.entropy is not None else self.contraction_rate

    def phase(self, frames: np.ndarray) -> np.ndarray:
        """Orbit phase of domain-reduced frames."""
        return 2.0 * np.pi * center_profile(frames)

    def curvature(self, a: np.ndarray | float, phase: np.ndarray | float = 0.0) -> np.ndarray:
        """K at orbit time `a` for orbits with the given phases (broadcast)."""
        return -(self.mean + self.amplitude * np.sin(self.frequency * np.asarray(a) + np.asarray(phase)))

    def orbit_curvature(self, phase: float = 0.0) -> Callable[[float], float]:
        return lambda a: -(self.mean + self.amplitude * math.sin(self.frequency * a + phase))

    def with_entropy(self, entropy: float) -> SamplerCurvature:
        return SamplerCurvature(self.mean, self.amplitude, self.frequency, entropy)

    def describe(self) -> str:
        return f"sampler(mean={self.mean!r}, amplitude={self.amplitude!r}, frequency={self.frequency!r})"


CurvatureModel = ConstantCurvature | SamplerCurvature


def build_curvature_model(params: dict | str) -> CurvatureModel:
    """
    Build a model from a preset name or a parameter dict.

    Raises:
        KeyError: If the preset name doesn't exist
        ValueError: If the kind is unknown or parameters are out of range
    """
    if isinstance(params, str):
        params = get_curvature_preset(params)
    kind = params.get("kind", "constant")
    if kind == "constant":
        return ConstantCurvature()
    if kind == "sampler":
        return SamplerCurvature(
            mean=float(params["mean"]),
            amplitude=float(params["amplitude"]),
            frequency=float(params.get("frequency", 1.0)),
            entropy=None if params.get("entropy") is None else float(params["entropy"]),
        )
    raise ValueError(f"Unknown curvature kind '{kind}'. Available kinds: constant, sampler")
