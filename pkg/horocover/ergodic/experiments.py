"""
Numerical experiments for the three horocycle asymptotics.

- theorem A: ∫₀ᵀ f∘h_s(x) ds against a(T)·Φ_T(x)·μ(f) on the cover
- theorem B: geodesic-pushed horocycle arcs against μ(f)
- theorem C: the power deviation of ergodic averages on the compact surface

Every experiment is a table with one row per (point, T) or (point, t) cell. Points are independent
cells handed to `mapper` (the builtin `map` by default, or a parallel map from the harness); rows are
concatenated in point order, so the table does not depend on how the cells were scheduled.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from functools import partial

import numpy as np
import pandas as pd
from scipy import stats

from horocover.cover import CoverPoint, ZdCover, flow_with_winding, frobenius_vector
from horocover.errors import ArcOverflow, DegenerateFit
from horocover.renorm import ConstantCurvature, CurvatureModel

from .horocycle import Observable, horocycle_integral

logger = logging.getLogger(__name__)

Mapper = Callable[[Callable, Sequence], Iterable]

MAX_PUSH_TIME = 14.0
NOISE_FLOOR = 1e-14
NOISE_FACTOR = 10.0
MIN_FIT_POINTS = 3


def geometric_schedule(start: float, stop: float, per_decade: int = 2) -> list[float]:
    """Geometric schedule from start to stop with `per_decade` points per factor of 10 (both ends included)."""
    if start <= 0 or stop < start:
        raise ValueError(f"Schedule needs 0 < start <= stop, got {start}, {stop}")
    count = round(per_decade * math.log10(stop / start))
    return [float(v) for v in np.logspace(math.log10(start), math.log10(stop), count + 1)]


def _sigma_array(sigma, dimension: int) -> np.ndarray:
    matrix = np.atleast_2d(np.asarray(sigma, dtype=float))
    if matrix.shape != (dimension, dimension):
        raise ValueError(f"Covariance has shape {matrix.shape}, expected ({dimension}, {dimension})")
    return matrix


def _constant_only(model: CurvatureModel | None) -> CurvatureModel:
    model = model or ConstantCurvature()
    if not model.is_constant:
        raise ValueError(
            f"Theorem experiments need the normalized volume as invariant measure; "
            f"only the constant curvature model qualifies, got {model.describe()}"
        )
    return model


@dataclass(frozen=True)
class AsymptoticPrediction:
    """
    Leading term a(T)·Φ_T(x)·μ(f) of the horocycle integral on a Z^d cover.

    Attributes:
        T: Orbit length, T > e
        t_star: Normalizing time (log T in constant curvature)
        frobenius: Winding vector F★ of the geodesic segment of length t★ from x
        sigma: Covariance Σ
        mass: μ(f)
        h_top: Topological entropy
    """

    T: float
    t_star: float
    frobenius: tuple[float, ...]
    sigma: np.ndarray
    mass: float
    h_top: float = 1.0

    def __post_init__(self):
        if self.T <= math.e:
            raise ValueError(f"Asymptotic prediction needs T > e, got {self.T}")
        object.__setattr__(self, "sigma", _sigma_array(self.sigma, len(self.frobenius)))

    @property
    def dimension(self) -> int:
        return len(self.frobenius)

    @property
    def amplitude(self) -> float:
        """a(T) = h^{d/2}/((2π)^{d/2}·√det Σ)·T/(log T)^{d/2}."""
        d = self.dimension
        normal = self.h_top ** (d / 2) / ((2 * math.pi) ** (d / 2) * math.sqrt(np.linalg.det(self.sigma)))
        return normal * self.T / math.log(self.T) ** (d / 2)

    @property
    def oscillation(self) -> float:
        """Φ_T = exp(-½·‖F★/√t★‖²_Σ)."""
        scaled = np.asarray(self.frobenius) / math.sqrt(self.t_star)
        return math.exp(-0.5 * float(scaled @ np.linalg.solve(self.sigma, scaled)))

    @property
    def value(self) -> float:
        return self.amplitude * self.oscillation * self.mass

    @property
    def envelope(self) -> float:
        """T·log log T/(log T)^{(d+1)/2}."""
        log_t = math.log(self.T)
        return self.T * math.log(log_t) / log_t ** ((self.dimension + 1) / 2)


# ===== Theorem A =====


def _theorem_a_cell(
    item: tuple[int, CoverPoint],
    f: Observable,
    schedule: Sequence[float],
    sigma: np.ndarray,
    cover: ZdCover,
    step: float,
    mass: float,
    h_top: float,
) -> list[dict]:
    index, x = item
    integral = horocycle_integral(f, x, max(schedule), step, cover, breakpoints=schedule)
    rows = []
    for T in schedule:
        value, error = integral.at(T)
        t_star = math.log(T) / h_top
        winding = frobenius_vector(x, t_star, cover)
        prediction = AsymptoticPrediction(T, t_star, winding.values, sigma, mass, h_top)
        residual = value - prediction.value
        rows.append(
            {
                "point": index,
                "T": T,
                "t_star": t_star,
                **{f"frobenius_{k}": v for k, v in enumerate(winding.values)},
                "integral": value,
                "error": error,
                "amplitude": prediction.amplitude,
                "oscillation": prediction.oscillation,
                "prediction": prediction.value,
                "residual": residual,
                "envelope": prediction.envelope,
                "normalized_residual": abs(residual) / prediction.envelope,
                "ratio": value / prediction.value if prediction.value != 0 else math.nan,
            }
        )
    logger.info(f"Theorem A: point {index} done up to T = {max(schedule):g}")
    return rows


def theorem_a_experiment(
    f: Observable,
    points: Sequence[CoverPoint],
    schedule: Sequence[float],
    sigma,
    cover: ZdCover,
    step: float,
    model: CurvatureModel | None = None,
    mapper: Mapper = map,
) -> pd.DataFrame:
    """
    Compare ∫₀ᵀ f∘h_s(x) ds with a(T)·Φ_T(x)·μ(f) along a schedule of orbit lengths.

    Args:
        f: Cover observable
        points: Start points, one table block each
        schedule: Orbit lengths, all > e
        sigma: Covariance Σ (array-like d×d)
        cover: Cover the points live on
        step: Quadrature panel length
        model: Curvature model (constant only)
        mapper: map-like callable used to evaluate the points

    Returns:
        One row per (point, T)

    Raises:
        StepTooCoarse: If step exceeds the bump radius / 8
    """
    model = _constant_only(model)
    schedule = sorted(float(T) for T in schedule)
    if not schedule or schedule[0] <= math.e:
        raise ValueError(f"Theorem A schedule must be non-empty with every T > e, got {schedule}")
    sigma = _sigma_array(sigma, cover.dimension)
    cell = partial(
        _theorem_a_cell,
        f=f,
        schedule=schedule,
        sigma=sigma,
        cover=cover,
        step=step,
        mass=f.mass(),
        h_top=model.h_top,
    )
    rows = [row for block in mapper(cell, list(enumerate(points))) for row in block]
    return pd.DataFrame(rows)


# ===== Theorem B =====


def pushed_arc_integral(
    f: Observable, x: CoverPoint, sigma_length: float, t: float, step: float, cover: ZdCover
) -> tuple[float, float]:
    """
    ∫₀^σ f(g_{-t}·h_s(x))·J_{-t}(h_s x) ds in constant curvature.

    g_{-t}·h_s = h_{e^{t}s}·g_{-t}, so this is the horocycle integral of length σ·e^{t} from g_{-t}(x).

    Raises:
        ArcOverflow: If t exceeds the largest supported push time
    """
    if t > MAX_PUSH_TIME:
        raise ArcOverflow(
            f"Push time t = {t} exceeds {MAX_PUSH_TIME}: the arc of length σ·e^t = {sigma_length * math.exp(t):.3e} "
            f"is too long to integrate"
        )
    if t < 0:
        raise ValueError(f"Push time must be non-negative, got {t}")
    start, _ = flow_with_winding(x, -t, cover) if t > 0 else (x, None)
    result = horocycle_integral(f, start, sigma_length * math.exp(t), step, cover)
    return result.value, result.error


def _theorem_b_cell(
    item: tuple[int, CoverPoint],
    f: Observable,
    sigma_length: float,
    times: Sequence[float],
    sigma: np.ndarray,
    cover: ZdCover,
    step: float,
    mass: float,
) -> list[dict]:
    index, x = item
    d = cover.dimension
    root_det = math.sqrt(np.linalg.det(sigma))
    rows = []
    for t in times:
        value, error = pushed_arc_integral(f, x, sigma_length, t, step, cover)
        if t == 0:
            normalization = 1.0 / sigma_length
        else:
            normalization = (2 * math.pi * t) ** (d / 2) * root_det * math.exp(-t) / sigma_length
        residual = normalization * value - mass
        rows.append(
            {
                "point": index,
                "t": t,
                "arc_integral": value,
                "error": error,
                "normalization": normalization,
                "normalized": normalization * value,
                "target": mass,
                "residual": residual,
                "scaled_residual": abs(residual) * math.sqrt(t) / math.log(t) if t > 1 else math.nan,
            }
        )
    logger.info(f"Theorem B: point {index} done up to t = {max(times):g}")
    return rows


def theorem_b_experiment(
    f: Observable,
    points: Sequence[CoverPoint],
    sigma_length: float,
    times: Sequence[float],
    sigma,
    cover: ZdCover,
    step: float,
    model: CurvatureModel | None = None,
    mapper: Mapper = map,
) -> pd.DataFrame:
    """
    Equidistribution of the pushed arcs g_{-t}∘h_{[0,σ]}(x), normalized by (2πt)^{d/2}·√det Σ/(e^{t}σ).

    Args:
        f: Observable ⟨η, U⟩
        points: Start points
        sigma_length: Arc length σ > 0
        times: Push times in [0, 14]
        sigma: Covariance Σ
        cover: Cover the points live on
        step: Quadrature panel length along the pushed arc
        model: Curvature model (constant only)
        mapper: map-like callable used to evaluate the points

    Returns:
        One row per (point, t)
    """
    _constant_only(model)
    if sigma_length <= 0:
        raise ValueError(f"Arc length σ must be positive, got {sigma_length}")
    times = sorted(float(t) for t in times)
    cell = partial(
        _theorem_b_cell,
        f=f,
        sigma_length=sigma_length,
        times=times,
        sigma=_sigma_array(sigma, cover.dimension),
        cover=cover,
        step=step,
        mass=f.mass(),
    )
    rows = [row for block in mapper(cell, list(enumerate(points))) for row in block]
    return pd.DataFrame(rows)


# ===== Theorem C =====


@dataclass(frozen=True)
class DeviationFit:
    """log(median deviation) ≈ intercept - exponent·log T."""

    exponent: float
    intercept: float
    r_squared: float
    points: int


def _theorem_c_cell(
    item: tuple[int, CoverPoint],
    f: Observable,
    schedule: Sequence[float],
    cover: ZdCover,
    step: float,
    mass: float,
) -> list[dict]:
    index, x = item
    integral = horocycle_integral(f, x, max(schedule), step, cover, breakpoints=schedule)
    rows = []
    for T in schedule:
        value, error = integral.at(T)
        average = value / T
        rows.append(
            {
                "point": index,
                "T": T,
                "integral": value,
                "error": error,
                "average": average,
                "mass": mass,
                "deviation": abs(average - mass),
                "noise_floor": max(NOISE_FACTOR * error / T, NOISE_FLOOR),
            }
        )
    logger.info(f"Theorem C: point {index} done up to T = {max(schedule):g}")
    return rows


def theorem_c_experiment(
    f: Observable,
    points: Sequence[CoverPoint],
    schedule: Sequence[float],
    cover: ZdCover,
    step: float,
    model: CurvatureModel | None = None,
    mapper: Mapper = map,
) -> pd.DataFrame:
    """
    Deviation |(1/T)∫₀ᵀ f∘h_s(x) ds - μ(f)| of ergodic averages of an observable on M.

    The deck coordinate plays no role; `cover` is only used to follow the orbit.
    """
    _constant_only(model)
    schedule = sorted(float(T) for T in schedule)
    if not schedule or schedule[0] <= 0:
        raise ValueError(f"Theorem C schedule must be non-empty and positive, got {schedule}")
    cell = partial(_theorem_c_cell, f=f, schedule=schedule, cover=cover, step=step, mass=f.mass())
    rows = [row for block in mapper(cell, list(enumerate(points))) for row in block]
    return pd.DataFrame(rows)


def fit_deviation_exponent(table: pd.DataFrame) -> DeviationFit:
    """
    Fit the decay exponent a of the median deviation over points, per T.

    T values whose median deviation sits below the median noise floor are left out.

    Raises:
        DegenerateFit: If fewer than three T values remain
    """
    grouped = table.groupby("T").agg(deviation=("deviation", "median"), noise_floor=("noise_floor", "median"))
    usable = grouped[grouped["deviation"] > grouped["noise_floor"]]
    if len(usable) < MIN_FIT_POINTS:
        raise DegenerateFit(
            f"Only {len(usable)} of {len(grouped)} orbit lengths have deviations above the quadrature noise floor; "
            f"at least {MIN_FIT_POINTS} are needed (rescale the observable or refine the step)"
        )
    fit = stats.linregress(np.log(usable.index.to_numpy(dtype=float)), np.log(usable["deviation"].to_numpy()))
    result = DeviationFit(-float(fit.slope), float(fit.intercept), float(fit.rvalue**2), len(usable))
    logger.info(f"Deviation exponent a = {result.exponent:.4f} (R² = {result.r_squared:.3f}, {result.points} points)")
    return result
