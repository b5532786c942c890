"""
Twist decomposition of cover observables.

π_ω(f)(x) = Σ_D E_ω(D)·f(D x) is a finite sum for compactly supported f, and integrating it over the torus
of twists recovers f. On a uniform N^d grid of twists the integral is a finite Fourier sum, exact once N
exceeds the spread of deck differences involved.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from horocover.cover import CoverPoint, TwistParameter, deck_character, xi_cocycle
from horocover.errors import GridTooCoarse

from .observables import CoverObservable

logger = logging.getLogger(__name__)

CoverFunction = Callable[[CoverPoint], complex]


def project_twist(f: CoverObservable, omega: TwistParameter | Sequence[float], x: CoverPoint) -> complex:
    """π_ω(f)(x) = b(base)·Σ_{K ∈ W} c_K·E_ω(K - deck(x)); with ω = 0 this is the periodization of f."""
    if x.dimension != f.dimension:
        raise ValueError(f"Cover point dimension {x.dimension} does not match observable dimension {f.dimension}")
    bump = float(f.bump(x.base.as_array()))
    if bump == 0.0:
        return 0j
    shifts = np.array(f.window, dtype=np.int64) - x.deck_array()
    characters = np.atleast_1d(deck_character(omega, shifts))
    return complex(bump * np.dot(np.array(f.coefficients), characters))


def project_twist_batch(
    f: CoverObservable, omega: TwistParameter | Sequence[float], frames: np.ndarray, decks: np.ndarray
) -> np.ndarray:
    """π_ω(f) at reduced frames (n, 2, 2) with deck coordinates (n, d)."""
    bump = f.bump(frames)
    decks = np.asarray(decks, dtype=np.int64).reshape(-1, f.dimension)
    window = np.array(f.window, dtype=np.int64)
    # (n, |W|) deck differences K - deck
    shifts = window[None, :, :] - decks[:, None, :]
    omega = omega.as_array() if isinstance(omega, TwistParameter) else np.asarray(omega, dtype=float)
    characters = np.exp(2j * np.pi * (shifts @ omega))
    return bump * (characters @ np.array(f.coefficients))


def apply_twist(u: CoverFunction, omega: TwistParameter | Sequence[float]) -> CoverFunction:
    """Ξ_ω u(x) = e^{2πi ξ_ω(x)}·u(x); unitary, modulus preserving."""

    def twisted(x: CoverPoint) -> complex:
        return np.exp(2j * np.pi * xi_cocycle(omega, x)) * u(x)

    return twisted


def twist_grid(grid: int, dimension: int) -> list[TwistParameter]:
    """The uniform grid {k/N} of twists, in lexicographic order."""
    if grid < 1:
        raise ValueError(f"Grid size must be positive, got {grid}")
    return [
        TwistParameter(tuple(k / grid for k in index)) for index in itertools.product(range(grid), repeat=dimension)
    ]


def minimum_grid(f: CoverObservable) -> int:
    """Smallest grid size the reconstruction accepts: 2·width + 1."""
    return 2 * f.width + 1


def reconstruct(f: CoverObservable, x: CoverPoint, grid: int, allow_aliasing: bool = False) -> complex:
    """
    Average of π_ω(f)(x) over the uniform N^d grid of twists.

    The average equals Σ_{K ≡ deck(x) mod N} c_K·b(base): f(x) itself whenever no other window copy is
    congruent to deck(x), which holds for every deck within `width` of the window once N >= 2·width + 1.

    Args:
        f: Observable
        x: Evaluation point
        grid: N, points per dimension
        allow_aliasing: Return the aliased sum below the grid bound instead of raising

    Raises:
        GridTooCoarse: If N < 2·width + 1 and aliasing is not allowed
    """
    needed = minimum_grid(f)
    if grid < needed and not allow_aliasing:
        raise GridTooCoarse(f"Reconstruction grid N = {grid} is below 2·width + 1 = {needed} for window {f.window}")
    values = [project_twist(f, omega, x) for omega in twist_grid(grid, f.dimension)]
    return complex(np.mean(values))


def aliased_value(f: CoverObservable, x: CoverPoint, grid: int) -> float:
    """Σ_{K ≡ deck(x) mod N} c_K·b(base): what a grid of size N reconstructs."""
    deck = x.deck_array()
    total = sum(
        c for copy, c in zip(f.window, f.coefficients, strict=True) if np.all((np.array(copy) - deck) % grid == 0)
    )
    return total * float(f.bump(x.base.as_array()))


@dataclass(frozen=True)
class TwistedSection:
    """
    Function on the cover with f(D⁻¹x) = E_ω(D)·f(x).

    Built from an observable by π_ω, or from any cover function claimed to be equivariant; the claim can
    be checked on sampled points.
    """

    omega: TwistParameter
    function: CoverFunction

    @classmethod
    def from_observable(cls, f: CoverObservable, omega: TwistParameter) -> TwistedSection:
        return cls(omega, lambda x: project_twist(f, omega, x))

    def __call__(self, x: CoverPoint) -> complex:
        return complex(self.function(x))

    def equivariance_residual(self, points: Sequence[CoverPoint], shifts: Sequence[Sequence[int]]) -> float:
        """Largest |f(D⁻¹x) - E_ω(D)·f(x)| over the sampled (x, D) pairs."""
        worst = 0.0
        for x, shift in zip(points, shifts, strict=True):
            moved = x.shifted([-v for v in shift])
            residual = abs(self(moved) - deck_character(self.omega, shift) * self(x))
            worst = max(worst, residual)
        logger.debug(f"Equivariance residual over {len(points)} pairs: {worst:.3e}")
        return worst
