"""
Stable and unstable Jacobi fields.

In constant curvature the stable field is J(t) = e^{-t}. For a curvature sampler the decaying solution of
J'' + K J = 0, J(0) = 1 is obtained from the Riccati variable u = J'/J: integrating u' = -K - u² backward
from a far horizon, seeded at the stable rest value -√(-K), converges onto the decaying branch, whereas a
forward integration of the second-order equation is swamped by the growing mode.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.integrate import solve_ivp

from horocover.errors import HorizonTooShort, NumericGuardError
from horocover.geometry import FuchsianGroup, advance_and_reduce, geodesic_batch

from .curvature import CurvatureModel

logger = logging.getLogger(__name__)

# Horizons are measured in units of the slowest contraction time 1/√(-k_hi)
SEED_HORIZON = 30.0
CHECK_EXTENSION = 10.0
SHOOTING_LENGTH = 12.0
HORIZON_TOLERANCE = 1e-8
RICCATI_RTOL = 1e-11
RICCATI_ATOL = 1e-12

OrbitCurvature = Callable[[float], float]


def _vectorize(curvature: OrbitCurvature | Callable[[float], np.ndarray]) -> Callable[[float], np.ndarray]:
    return lambda a: np.atleast_1d(np.asarray(curvature(a), dtype=float))


def _riccati(
    curvature: Callable[[float], np.ndarray], size: int, start: float, stop: float, seed_sign: float
):
    """Integrate (u, I) with u' = -K - u², I' = u from `start` to `stop`, seeding u at ±√(-K(start))."""
    seed = seed_sign * np.sqrt(-curvature(start)) * np.ones(size)
    state = np.concatenate([seed, np.zeros(size)])

    def rhs(a: float, y: np.ndarray) -> np.ndarray:
        u = y[:size]
        return np.concatenate([-curvature(a) - u * u, u])

    solution = solve_ivp(
        rhs, (start, stop), state, method="DOP853", rtol=RICCATI_RTOL, atol=RICCATI_ATOL, dense_output=True
    )
    if not solution.success:
        raise NumericGuardError(f"Riccati integration from {start:g} to {stop:g} failed: {solution.message}")
    return solution.sol


class JacobiProfile:
    """
    Decaying Jacobi fields of many orbits on [0, t_max].

    Args:
        curvature: Vectorized orbit curvature a -> K(a) of shape (size,)
        size: Number of orbits
        t_max: Largest time the profile is evaluated at
        contraction_rate: Lower bound for √(-K); sets the default horizon
        horizon: Backward seeding distance beyond t_max (default 30/contraction_rate)
        check_horizon: Re-solve from a longer horizon and compare u(0)

    Raises:
        HorizonTooShort: If `check_horizon` is set and u(0) moves by more than 1e-8
    """

    def __init__(
        self,
        curvature: Callable[[float], np.ndarray],
        size: int,
        t_max: float,
        contraction_rate: float,
        horizon: float | None = None,
        check_horizon: bool = False,
    ):
        if t_max < 0:
            raise ValueError(f"Profile needs t_max >= 0, got {t_max}")
        self.t_max = float(t_max)
        self.horizon = SEED_HORIZON / contraction_rate if horizon is None else float(horizon)
        self._size = int(size)
        self._solution = _riccati(curvature, self._size, self.t_max + self.horizon, 0.0, -1.0)
        if check_horizon:
            extended = self.horizon + CHECK_EXTENSION / contraction_rate
            other = _riccati(curvature, self._size, self.t_max + extended, 0.0, -1.0)
            drift = float(np.max(np.abs(other(0.0)[: self._size] - self.initial_slope)))
            if drift > HORIZON_TOLERANCE:
                raise HorizonTooShort(
                    f"Backward horizon {self.horizon:g} leaves u(0) unsettled: extending it by "
                    f"{extended - self.horizon:g} moves u(0) by {drift:.3e} > {HORIZON_TOLERANCE:g}"
                )
        logger.debug(f"Riccati profile for {self._size} orbits on [0, {self.t_max:g}], horizon {self.horizon:g}")

    @classmethod
    def from_model(
        cls,
        model: CurvatureModel,
        phases: np.ndarray,
        t_max: float,
        horizon: float | None = None,
        check_horizon: bool = False,
    ) -> JacobiProfile:
        """Profiles of the model's orbits with the given phases."""
        phases = np.atleast_1d(np.asarray(phases, dtype=float))
        return cls(
            lambda a: model.curvature(a, phases), phases.size, t_max, model.contraction_rate, horizon, check_horizon
        )

    @property
    def size(self) -> int:
        return self._size

    @property
    def initial_slope(self) -> np.ndarray:
        """u(0) = J'(0)/J(0) for every orbit."""
        return self._solution(0.0)[: self._size]

    def log_jacobi(self, a: np.ndarray | float) -> np.ndarray:
        """log J at times `a`, shape (n,) + shape(a)."""
        a = np.asarray(a, dtype=float)
        if np.any(a < 0) or np.any(a > self.t_max + 1e-12):
            raise ValueError(f"Profile covers [0, {self.t_max:g}], asked for {a.min():g}..{a.max():g}")
        flat = a.reshape(-1)
        integral = self._solution(flat)[self._size :] - self._solution(0.0)[self._size :, None]
        return integral.reshape((self._size,) + a.shape)

    def __call__(self, a: np.ndarray | float) -> np.ndarray:
        return np.exp(self.log_jacobi(a))

    def riccati(self, a: np.ndarray | float) -> np.ndarray:
        """u = J'/J at times `a`."""
        a = np.asarray(a, dtype=float)
        return self._solution(a.reshape(-1))[: self._size].reshape((self._size,) + a.shape)


def jacobi_field(
    model: CurvatureModel,
    t: float,
    curvature: OrbitCurvature | None = None,
    horizon: float | None = None,
) -> float:
    """
    Decaying Jacobi field J(t) with J(0) = 1 along one orbit.

    Args:
        model: Curvature model
        t: Orbit time, t >= 0
        curvature: Orbit curvature a -> K(a); defaults to the model's orbit of phase 0
        horizon: Backward seeding distance beyond t

    Returns:
        e^{-t} for the constant model, the Riccati solution otherwise

    Raises:
        HorizonTooShort: If the backward horizon does not settle u(0) to 1e-8

    Example:
        >>> jacobi_field(ConstantCurvature(), 1.0) == math.exp(-1.0)
        True
    """
    if t < 0:
        raise ValueError(f"Decaying Jacobi field needs t >= 0, got {t}")
    if model.is_constant and curvature is None:
        return math.exp(-t)

    orbit = _vectorize(curvature or model.orbit_curvature(0.0))
    rate = model.contraction_rate
    horizon = SEED_HORIZON / rate if horizon is None else float(horizon)
    solution = _riccati(orbit, 1, t + horizon, 0.0, -1.0)
    extended = _riccati(orbit, 1, t + horizon + CHECK_EXTENSION / rate, 0.0, -1.0)
    drift = abs(float(extended(0.0)[0] - solution(0.0)[0]))
    if drift > HORIZON_TOLERANCE:
        raise HorizonTooShort(f"Backward horizon {horizon:g} leaves u(0) unsettled (drift {drift:.3e})")
    return math.exp(float(solution(t)[1] - solution(0.0)[1]))


def unstable_jacobi_field(
    model: CurvatureModel,
    t: float,
    curvature: OrbitCurvature | None = None,
    horizon: float | None = None,
) -> float:
    """
    Expanding Jacobi field with J^u(0) = 1, for any sign of t.

    Seeded at the unstable rest value +√(-K) a horizon before min(0, t) and integrated forward.
    """
    if model.is_constant and curvature is None:
        return math.exp(t)
    orbit = _vectorize(curvature or model.orbit_curvature(0.0))
    horizon = SEED_HORIZON / model.contraction_rate if horizon is None else float(horizon)
    solution = _riccati(orbit, 1, min(0.0, t) - horizon, max(0.0, t), 1.0)
    return math.exp(float(solution(t)[1] - solution(0.0)[1]))


def stable_divergence(model: CurvatureModel, t: float, curvature: OrbitCurvature | None = None) -> float:
    """Φ⁻(t) = -J'(t)/J(t), the contraction rate of the stable field at time t."""
    if t < 0:
        raise ValueError(f"Stable divergence needs t >= 0, got {t}")
    if model.is_constant and curvature is None:
        return 1.0
    orbit = _vectorize(curvature or model.orbit_curvature(0.0))
    solution = _riccati(orbit, 1, t + SEED_HORIZON / model.contraction_rate, 0.0, -1.0)
    return -float(solution(t)[0])


def backward_jacobi_field(
    model: CurvatureModel,
    t: float,
    curvature: OrbitCurvature | None = None,
    horizon: float | None = None,
) -> float:
    """
    J_{-t}(g_t x) = J(0)/J(t) along the orbit of x, t >= 0.

    The stable field is normalized at g_t x and the Riccati solution is carried from the far horizon back
    past g_t x down to x, without inverting the forward field.

    Args:
        model: Curvature model
        t: Orbit time from x to g_t x
        curvature: Orbit curvature a -> K(a) seen from x; defaults to the model's orbit of phase 0
        horizon: Seeding distance beyond g_t x
    """
    if t < 0:
        raise ValueError(f"Backward Jacobi field needs t >= 0, got {t}")
    orbit = _vectorize(curvature or model.orbit_curvature(0.0))
    horizon = SEED_HORIZON / model.contraction_rate if horizon is None else float(horizon)
    solution = _riccati(lambda a: orbit(a + t), 1, horizon, -t, -1.0)
    return math.exp(float(solution(-t)[1] - solution(0.0)[1]))


def shooting_jacobi(curvature: OrbitCurvature, t: float, k_hi: float, length: float | None = None) -> float:
    """
    Reference value of the decaying Jacobi field by shooting.

    Solves J'' + K J = 0 forward for the two fundamental solutions (J(0), J'(0)) = (1, 0) and (0, 1) up to
    L = t + 12/√(-k_hi) and picks the combination vanishing at L. Accurate while e^{2√(-k_lo)·t} times
    the integration tolerance stays small.
    """
    if t < 0:
        raise ValueError(f"Shooting needs t >= 0, got {t}")
    if k_hi >= 0:
        raise ValueError(f"Shooting needs negative curvature, got k_hi = {k_hi}")
    length = t + SHOOTING_LENGTH / math.sqrt(-k_hi) if length is None else float(length)

    def rhs(a: float, y: np.ndarray) -> np.ndarray:
        k = curvature(a)
        return np.array([y[1], -k * y[0], y[3], -k * y[2]])

    solution = solve_ivp(
        rhs, (0.0, length), np.array([1.0, 0.0, 0.0, 1.0]), method="DOP853", rtol=1e-13, atol=1e-15, dense_output=True
    )
    if not solution.success:
        raise NumericGuardError(f"Shooting integration to {length:g} failed: {solution.message}")
    slope = -solution.y[0, -1] / solution.y[2, -1]
    state = solution.sol(t)
    return float(state[0] + slope * state[2])


def jacobi_at_frames(
    model: CurvatureModel,
    frames: np.ndarray,
    t: float,
    group: FuchsianGroup,
    horizon: float | None = None,
) -> np.ndarray:
    """
    J_t at each domain-reduced frame, for either sign of t.

    For t < 0 the backward field is J_t(y) = 1/J_{-t}(g_t y).
    """
    frames = np.asarray(frames, dtype=float).reshape(-1, 2, 2)
    if model.is_constant:
        return np.full(frames.shape[0], math.exp(-t))
    if t == 0.0:
        return np.ones(frames.shape[0])
    if t > 0:
        profile = JacobiProfile.from_model(model, model.phase(frames), t, horizon)
        return profile(t)
    back, _, _ = advance_and_reduce(frames, t, group, geodesic_batch)
    profile = JacobiProfile.from_model(model, model.phase(back), -t, horizon)
    return 1.0 / profile(-t)
