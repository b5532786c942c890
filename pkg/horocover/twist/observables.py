"""
Compactly supported observables on the cover and on M.

A base bump lives strictly inside the disk inscribed in the fundamental domain, so it reads the same on
every reduced representative and its lifts to different tiles never overlap. Cover observables place
weighted copies of one bump on finitely many tiles.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from horocover.cover import CoverPoint
from horocover.geometry import INRADIUS, UNIT_TANGENT_VOLUME, distance_batch, frame_coordinates, frame_from_polar
from horocover.renorm.quadrature import composite_gauss_legendre

# Bounds on the first and second derivatives of cos⁴
_D1 = 1.3
_D2 = 4.0


def _cos4_bump(x: np.ndarray) -> np.ndarray:
    """cos⁴(πx/2) on |x| < 1, else 0."""
    x = np.abs(x)
    return np.where(x < 1.0, np.cos(0.5 * np.pi * np.minimum(x, 1.0)) ** 4, 0.0)


@dataclass(frozen=True)
class BaseBump:
    """
    C² bump cos⁴(πd/2ρ)·cos⁴(πΔ/2α) in the fundamental domain.

    Args:
        center: Disk-model position of the bump center
        radius: Hyperbolic radius ρ of the spatial support
        fiber_center: Direction angle (disk chart) the fiber factor peaks at
        fiber_width: Half-width α of the fiber support; α >= π makes the bump constant along fibers
    """

    center: complex = 0j
    radius: float = 0.5
    fiber_center: float = 0.0
    fiber_width: float = math.pi

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.radius <= 0 or self.fiber_width <= 0:
            raise ValueError(f"Bump radii must be positive, got {self.radius}, {self.fiber_width}")
        if abs(self.center) >= 1:
            raise ValueError(f"Bump center {self.center} lies outside the disk")
        reach = self.center_distance + self.radius
        if reach >= INRADIUS:
            raise ValueError(
                f"Bump support reaches distance {reach:.4f} from the domain center; it must stay below {INRADIUS:.4f}"
            )

    @property
    def center_distance(self) -> float:
        """Hyperbolic distance of the bump center from the domain center."""
        return 2.0 * math.atanh(abs(self.center))

    @property
    def full_fiber(self) -> bool:
        return self.fiber_width >= math.pi

    @property
    def center_frame(self) -> np.ndarray:
        direction = cmath.phase(self.center) if self.center != 0 else 0.0
        return frame_from_polar(self.center_distance, direction, 0.0)

    def __call__(self, frames: np.ndarray) -> np.ndarray:
        """Bump values at frames of shape (..., 2, 2)."""
        frames = np.asarray(frames, dtype=float)
        distance = distance_batch(self.center_frame, frames)
        values = _cos4_bump(distance / self.radius)
        if not self.full_fiber:
            _, _, theta = frame_coordinates(frames)
            offset = np.angle(np.exp(1j * (theta - self.fiber_center)))
            values = values * _cos4_bump(offset / self.fiber_width)
        return values

    def fiber_mass(self) -> float:
        """Integral of the fiber factor over one fiber."""
        return 2.0 * math.pi if self.full_fiber else 0.75 * self.fiber_width

    def mass(self) -> float:
        """μ(b): the Liouville integral normalized so that vol(M) = 1."""
        spatial, _ = composite_gauss_legendre(
            lambda d: _cos4_bump(d / self.radius) * np.sinh(d), 0.0, self.radius, self.radius / 16.0
        )
        return 2.0 * math.pi * spatial * self.fiber_mass() / UNIT_TANGENT_VOLUME

    def c2_bound(self) -> float:
        """Upper bound for the C² norm from the bump parameters."""
        k_rho = 0.5 * math.pi / self.radius
        k_alpha = 0.0 if self.full_fiber else 0.5 * math.pi / self.fiber_width
        return 1.0 + _D1 * (k_rho + k_alpha) + _D2 * (k_rho**2 + k_alpha**2) + _D1 * _D1 * k_rho * k_alpha


@dataclass(frozen=True)
class CoverObservable:
    """f(base, deck) = c_deck·b(base) for deck in the window, else 0."""

    window: tuple[tuple[int, ...], ...]
    coefficients: tuple[float, ...]
    bump: BaseBump

    def __post_init__(self):
        window = tuple(tuple(int(v) for v in copy) for copy in self.window)
        coefficients = tuple(float(c) for c in self.coefficients)
        if not window:
            raise ValueError("Observable window must contain at least one deck copy")
        if len(window) != len(coefficients):
            raise ValueError(f"Window has {len(window)} copies but {len(coefficients)} coefficients")
        if len({len(copy) for copy in window}) != 1:
            raise ValueError("Window deck vectors must share one dimension")
        if len(set(window)) != len(window):
            raise ValueError(f"Window lists a deck copy twice: {window}")
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def single(cls, bump: BaseBump, dimension: int, coefficient: float = 1.0) -> CoverObservable:
        """One copy on the base tile."""
        return cls(((0,) * dimension,), (coefficient,), bump)

    @property
    def dimension(self) -> int:
        return len(self.window[0])

    @property
    def width(self) -> int:
        """Largest coordinate range max K_i - min K_i over the window."""
        array = np.array(self.window)
        return int(np.max(array.max(axis=0) - array.min(axis=0)))

    def coefficient(self, deck: Sequence[int]) -> float:
        return dict(zip(self.window, self.coefficients, strict=True)).get(tuple(int(v) for v in deck), 0.0)

    def __call__(self, x: CoverPoint) -> float:
        return self.coefficient(x.deck) * float(self.bump(x.base.as_array()))

    def evaluate(self, frames: np.ndarray, decks: np.ndarray) -> np.ndarray:
        """Values at reduced frames (n, 2, 2) with deck coordinates (n, d)."""
        return self.coefficients_at(decks) * self.bump(frames)

    def coefficients_at(self, decks: np.ndarray) -> np.ndarray:
        lookup = dict(zip(self.window, self.coefficients, strict=True))
        decks = np.asarray(decks, dtype=np.int64).reshape(-1, self.dimension)
        return np.array([lookup.get(tuple(row), 0.0) for row in decks.tolist()])

    def sup_norm(self) -> float:
        return max(abs(c) for c in self.coefficients)

    def c2_bound(self) -> float:
        return self.sup_norm() * self.bump.c2_bound()

    def mass(self) -> float:
        """μ(f) = Σ c_K·μ(b)."""
        return sum(self.coefficients) * self.bump.mass()


@dataclass(frozen=True)
class SurfaceObservable:
    """Observable on M: the bump on every tile with weight 1."""

    bump: BaseBump

    def __call__(self, x: CoverPoint) -> float:
        return float(self.bump(x.base.as_array()))

    def evaluate(self, frames: np.ndarray, decks: np.ndarray | None = None) -> np.ndarray:
        return self.bump(frames)

    def sup_norm(self) -> float:
        return 1.0

    def c2_bound(self) -> float:
        return self.bump.c2_bound()

    def mass(self) -> float:
        return self.bump.mass()


@dataclass(frozen=True)
class ConstantObservable:
    """Constant function on M."""

    value: float = 1.0

    def __call__(self, x: CoverPoint) -> float:
        return self.value

    def evaluate(self, frames: np.ndarray, decks: np.ndarray | None = None) -> np.ndarray:
        return np.full(np.asarray(frames).shape[:-2], self.value)

    def sup_norm(self) -> float:
        return abs(self.value)

    def c2_bound(self) -> float:
        return abs(self.value)

    def mass(self) -> float:
        return self.value
