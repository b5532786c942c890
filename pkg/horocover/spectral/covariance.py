"""
Monte Carlo estimate of the winding covariance Σ.

Σ = lim (1/t)·E[F(x,t)·F(x,t)ᵀ] with F(x,t) the winding of the geodesic segment of length t from a
volume-random x. Samples are drawn in fixed-size batches, each from its own seed stream, so the estimate
depends only on (seed, n, t) and not on how batches are scheduled.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import partial

import numpy as np
import pandas as pd

from horocover.cover import ZdCover, flow_batch_with_winding
from horocover.errors import SingularEstimate
from horocover.geometry import sample_domain_frames
from horocover.renorm import CurvatureModel
from horocover.utils import seed_streams

logger = logging.getLogger(__name__)

Mapper = Callable[[Callable, Sequence], Iterable]

BATCH_SIZE = 1000
MIN_TIME = 20.0
MIN_SAMPLES = 1000
SYMMETRY_TOLERANCE = 1e-12
DRIFT_THRESHOLD = 3.0


@dataclass(frozen=True)
class CovarianceMatrix:
    """
    Estimated covariance Σ with its Cholesky factor and per-entry standard errors.

    Raises:
        SingularEstimate: If Σ is not positive definite
    """

    matrix: np.ndarray
    samples: int = 0
    time: float = 0.0
    standard_errors: np.ndarray | None = field(default=None, compare=False)
    mean: np.ndarray | None = field(default=None, compare=False)
    cholesky: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        matrix = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Covariance must be square, got shape {matrix.shape}")
        asymmetry = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
        if asymmetry > SYMMETRY_TOLERANCE * max(1.0, float(np.max(np.abs(matrix)))):
            raise ValueError(f"Covariance is not symmetric (max asymmetry {asymmetry:.3e})")
        matrix = 0.5 * (matrix + matrix.T)
        try:
            factor = np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError as e:
            raise SingularEstimate(
                f"Estimated covariance is not positive definite (eigenvalues {np.linalg.eigvalsh(matrix)}); "
                f"raise the sample count or the flow time, or check the projection for zero rows"
            ) from e
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "cholesky", factor)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def drift(self) -> float:
        """Largest |mean F_i| in units of its standard error √(Σ_ii·t/n); NaN without samples."""
        if self.mean is None or self.samples == 0:
            return math.nan
        scale = np.sqrt(np.diag(self.matrix) * self.time / self.samples)
        return float(np.max(np.abs(self.mean) / scale))

    @property
    def drift_flagged(self) -> bool:
        return bool(self.drift > DRIFT_THRESHOLD)

    def to_frame(self) -> pd.DataFrame:
        """Long-format table with one row per entry (i, j)."""
        errors = self.standard_errors if self.standard_errors is not None else np.full(self.matrix.shape, np.nan)
        d = self.dimension
        return pd.DataFrame(
            {
                "i": np.repeat(np.arange(d), d),
                "j": np.tile(np.arange(d), d),
                "value": self.matrix.ravel(),
                "standard_error": errors.ravel(),
                "samples": self.samples,
                "time": self.time,
            }
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> CovarianceMatrix:
        d = int(frame["i"].max()) + 1
        matrix = np.zeros((d, d))
        errors = np.zeros((d, d))
        matrix[frame["i"], frame["j"]] = frame["value"]
        errors[frame["i"], frame["j"]] = frame["standard_error"]
        return cls(matrix, int(frame["samples"].iloc[0]), float(frame["time"].iloc[0]), errors)


def _winding_batch(item: tuple[int, int], seed: int, t: float, cover: ZdCover, step: float) -> np.ndarray:
    index, size = item
    rng = seed_streams(seed, (index,))
    frames = sample_domain_frames(rng, size, cover.group)
    if t == 0:
        return np.zeros((size, cover.dimension))
    _, winding, _ = flow_batch_with_winding(frames, t, cover, step)
    return winding


def sample_windings(
    t: float, n: int, seed: int, cover: ZdCover, step: float = 1.0, mapper: Mapper = map
) -> np.ndarray:
    """
    Winding vectors F(x, t) for n volume-random x.

    Returns:
        Array (n, d), batches concatenated in batch order
    """
    if n < 1:
        raise ValueError(f"Sample count must be positive, got {n}")
    if t < 0:
        raise ValueError(f"Flow time must be non-negative, got {t}")
    sizes = [min(BATCH_SIZE, n - start) for start in range(0, n, BATCH_SIZE)]
    cell = partial(_winding_batch, seed=seed, t=t, cover=cover, step=step)
    blocks = list(mapper(cell, list(enumerate(sizes))))
    return np.concatenate(blocks).astype(float)


def estimate_sigma(
    model: CurvatureModel,
    t: float,
    n: int,
    seed: int,
    cover: ZdCover,
    step: float = 1.0,
    mapper: Mapper = map,
) -> CovarianceMatrix:
    """
    Σ̂ = (1/n)·Σ F·Fᵀ/t over volume-random start frames.

    The geodesic flow and the windings do not depend on the curvature model; volume is the measure of
    maximal entropy only for the constant model, so other models get a warning.

    Args:
        model: Curvature model
        t: Flow time, t >= 20
        n: Sample count, n >= 1000
        seed: Master seed
        cover: Cover defining the windings
        step: Chunk length of the flow
        mapper: map-like callable over batches

    Returns:
        CovarianceMatrix with standard errors and the mean-drift diagnostic

    Raises:
        SingularEstimate: If the estimate is not positive definite
    """
    if t < MIN_TIME:
        raise ValueError(f"Covariance estimation needs t >= {MIN_TIME:g}, got {t}")
    if n < MIN_SAMPLES:
        raise ValueError(f"Covariance estimation needs n >= {MIN_SAMPLES}, got {n}")
    if not model.is_constant:
        logger.warning(f"Sampling windings by volume for {model.describe()}; volume is not its entropy measure")

    windings = sample_windings(t, n, seed, cover, step, mapper)
    products = np.einsum("ni,nj->nij", windings, windings) / t
    matrix = products.mean(axis=0)
    errors = products.std(axis=0, ddof=1) / math.sqrt(n)
    estimate = CovarianceMatrix(matrix, n, t, errors, windings.mean(axis=0))
    if estimate.drift_flagged:
        logger.warning(f"Mean winding drift {estimate.drift:.2f} standard errors exceeds {DRIFT_THRESHOLD:g}")
    logger.info(f"Σ estimated from {n} samples at t = {t:g}: diagonal {np.diag(matrix)}")
    return estimate
