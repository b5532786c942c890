"""
Ulam discretization of the twisted transfer operators.

M is covered by the box [-R, R]² × [0, 2π) in (disk position, fiber angle) with R the Euclidean radius of
the disk circumscribing the fundamental domain. Every cell meeting the domain is sampled: the row of the
cell averages G_{t,ω}(x)·J_{-t}(x)·1[g_{-t}x ∈ cell j] over volume-weighted points x of the cell. The
sparsity pattern, weights and windings do not depend on ω, so one assembly serves the whole ω-grid.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg
from scipy.spatial import cKDTree

from horocover.cover import ZdCover, flow_batch_with_winding
from horocover.errors import DegenerateFit, PowerIterationStall
from horocover.geometry import CIRCUMRADIUS, frame_coordinates, frame_from_disk, in_domain
from horocover.renorm import CurvatureModel, jacobi_at_frames
from horocover.utils import seed_streams

logger = logging.getLogger(__name__)

Mapper = Callable[[Callable, Sequence], Iterable]

DISK_RADIUS = math.tanh(0.5 * CIRCUMRADIUS)
ATTEMPT_FACTOR = 4
BLOCK_CELLS = 512
POWER_TOLERANCE = 1e-8
POWER_MAX_ITERATIONS = 10_000
DUMP_MAX_ROWS = 4096
# Smallest ‖ω‖ entering the strict-ordering check
ORDERING_RADIUS = 0.1


@dataclass(frozen=True)
class UlamGrid:
    """Regular n₁ × n₂ × n₃ box grid over (u, v, θ) ∈ [-R, R]² × [0, 2π)."""

    shape: tuple[int, int, int]
    radius: float = DISK_RADIUS

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        if len(shape) != 3 or min(shape) < 1:
            raise ValueError(f"Ulam grid needs three positive cell counts, got {self.shape}")
        object.__setattr__(self, "shape", shape)

    @classmethod
    def cube(cls, n: int) -> UlamGrid:
        return cls((n, n, n))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def widths(self) -> np.ndarray:
        return np.array([2 * self.radius / self.shape[0], 2 * self.radius / self.shape[1], 2 * np.pi / self.shape[2]])

    def lower_corners(self, cells: np.ndarray) -> np.ndarray:
        index = np.stack(np.unravel_index(cells, self.shape), axis=-1)
        return index * self.widths + np.array([-self.radius, -self.radius, 0.0])

    def cell_of(self, frames: np.ndarray) -> np.ndarray:
        """Flat cell index of each reduced frame."""
        u, v, theta = frame_coordinates(frames)
        i = np.clip(np.floor((u + self.radius) / self.widths[0]).astype(np.int64), 0, self.shape[0] - 1)
        j = np.clip(np.floor((v + self.radius) / self.widths[1]).astype(np.int64), 0, self.shape[1] - 1)
        k = np.floor(theta / self.widths[2]).astype(np.int64) % self.shape[2]
        return np.ravel_multi_index((i, j, k), self.shape)


def _assemble_block(
    cells: np.ndarray,
    grid: UlamGrid,
    samples: int,
    seed: int,
    t: float,
    cover: ZdCover,
    model: CurvatureModel,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(source cell, raw target cell, row weight, backward winding) for every kept sample of `cells`."""
    attempts = ATTEMPT_FACTOR * samples
    draws = np.stack([seed_streams(seed, (int(cell),)).random((attempts, 3)) for cell in cells])
    points = grid.lower_corners(cells)[:, None, :] + draws * grid.widths
    w_squared = points[..., 0] ** 2 + points[..., 1] ** 2
    inside_disk = w_squared < grid.radius**2
    u = np.where(inside_disk, points[..., 0], 0.0)
    v = np.where(inside_disk, points[..., 1], 0.0)
    frames = frame_from_disk(u.ravel(), v.ravel(), points[..., 2].ravel())
    mask = inside_disk & in_domain(frames, cover.group, tolerance=0.0).reshape(inside_disk.shape)
    mask &= np.cumsum(mask, axis=1) <= samples

    source = np.broadcast_to(cells[:, None], mask.shape)[mask]
    kept = frames.reshape(mask.shape + (2, 2))[mask]
    if kept.shape[0] == 0:
        empty = np.zeros(0)
        return empty.astype(np.int64), empty.astype(np.int64), empty, np.zeros((0, cover.dimension))

    density = 4.0 / (1.0 - w_squared[mask]) ** 2
    row_totals = np.zeros(grid.size)
    np.add.at(row_totals, source, density)
    weights = density / row_totals[source]
    if model.is_constant:
        weights = weights * math.exp(model.h_top * t)
    else:
        weights = weights * jacobi_at_frames(model, kept, -t, cover.group)

    back, winding, _ = flow_batch_with_winding(kept, -t, cover)
    return source.astype(np.int64), grid.cell_of(back), weights, winding


class UlamOperator:
    """
    Sparse Ulam matrices A(ω) of the twisted transfer operators at time t.

    Rows and columns are indexed by the active cells (cells with at least one sample in the domain).
    Images landing in an inactive cell are reassigned to the nearest active cell.
    """

    def __init__(
        self,
        grid: UlamGrid,
        t: float,
        active: np.ndarray,
        rows: np.ndarray,
        cols: np.ndarray,
        weights: np.ndarray,
        windings: np.ndarray,
        h_top: float = 1.0,
    ):
        self.grid = grid
        self.t = t
        self.active = active
        self.rows = rows
        self.cols = cols
        self.weights = weights
        self.windings = windings
        self.h_top = h_top

    @classmethod
    def assemble(
        cls,
        model: CurvatureModel,
        t: float,
        cover: ZdCover,
        grid: UlamGrid,
        samples: int,
        seed: int,
        mapper: Mapper = map,
    ) -> UlamOperator:
        """
        Sample every cell and flow the samples back for time t.

        Args:
            model: Curvature model for the weight J_{-t}
            t: Transfer time, t > 0
            cover: Cover defining the windings
            grid: Cell grid
            samples: Samples per cell N_s
            seed: Master seed; cell c draws from stream (seed, c)
            mapper: map-like callable over blocks of cells
        """
        if t <= 0:
            raise ValueError(f"Transfer time must be positive, got {t}")
        if samples < 1:
            raise ValueError(f"Samples per cell must be positive, got {samples}")
        blocks = [np.arange(start, min(start + BLOCK_CELLS, grid.size)) for start in range(0, grid.size, BLOCK_CELLS)]
        cell = partial(_assemble_block, grid=grid, samples=samples, seed=seed, t=t, cover=cover, model=model)
        parts = list(mapper(cell, blocks))
        source = np.concatenate([p[0] for p in parts])
        target = np.concatenate([p[1] for p in parts])
        weights = np.concatenate([p[2] for p in parts])
        windings = np.concatenate([p[3] for p in parts])

        active = np.unique(source)
        if active.size == 0:
            raise ValueError(f"No cell of the {grid.shape} grid meets the fundamental domain")
        compact = np.full(grid.size, -1, dtype=np.int64)
        compact[active] = np.arange(active.size)
        missing = compact[target] < 0
        if np.any(missing):
            coordinates = np.stack(np.unravel_index(active, grid.shape), axis=-1).astype(float)
            box = [4.0 * max(grid.shape), 4.0 * max(grid.shape), float(grid.shape[2])]
            tree = cKDTree(coordinates, boxsize=box)
            queries = np.stack(np.unravel_index(target[missing], grid.shape), axis=-1).astype(float)
            _, nearest = tree.query(queries)
            target = target.copy()
            target[missing] = active[nearest]
            logger.warning(f"Remapped {int(missing.sum())} samples landing in inactive cells")
        logger.info(f"Ulam operator: {active.size} active cells of {grid.size}, {source.size} samples, t = {t:g}")
        return cls(grid, t, active, compact[source], compact[target], weights, windings, model.h_top)

    @property
    def size(self) -> int:
        return self.active.size

    def matrix(self, omega: Sequence[float] | np.ndarray | None = None) -> sparse.csr_matrix:
        """A(ω); real for ω = 0 or omitted, complex otherwise. Duplicate (i, j) samples are summed."""
        shape = (self.size, self.size)
        if omega is None or not np.any(np.asarray(omega)):
            return sparse.csr_matrix((self.weights, (self.rows, self.cols)), shape=shape)
        phase = -(self.windings @ np.asarray(omega, dtype=float))
        data = self.weights * np.exp(2j * np.pi * phase)
        return sparse.csr_matrix((data, (self.rows, self.cols)), shape=shape)

    def leading_eigenvalue(self, omega: Sequence[float] | np.ndarray | None = None) -> tuple[complex, int]:
        """(λ(ω, t), iterations) by power iteration."""
        value, _, iterations = power_iteration(self.matrix(omega))
        return value, iterations

    def second_eigenvalue(self, omega: Sequence[float] | np.ndarray | None = None) -> complex:
        """Raw second-largest eigenvalue in modulus from ARPACK; NaN if it does not converge."""
        if self.size < 4:
            return complex(math.nan)
        a = self.matrix(omega).astype(complex)
        try:
            values = sparse_linalg.eigs(a, k=2, which="LM", return_eigenvectors=False)
        except (sparse_linalg.ArpackNoConvergence, sparse_linalg.ArpackError) as e:
            logger.warning(f"Second eigenvalue did not converge: {e}")
            return complex(math.nan)
        return complex(sorted(values, key=abs)[0])

    def dump(self, path: Path | str, omega: Sequence[float] | np.ndarray | None = None) -> Path:
        """
        Write A(ω) densely.

        Layout: two little-endian int64 (rows, cols), then rows·cols complex entries in row-major order,
        each as a little-endian float64 pair (real, imag).
        """
        if self.size > DUMP_MAX_ROWS:
            raise ValueError(f"Dense dump limited to {DUMP_MAX_ROWS} rows, operator has {self.size}")
        path = Path(path)
        dense = self.matrix(omega).toarray().astype("<c16")
        with open(path, "wb") as f:
            f.write(np.array(dense.shape, dtype="<i8").tobytes())
            f.write(dense.tobytes(order="C"))
        logger.info(f"Ulam matrix {dense.shape} written to {path}")
        return path


def load_dump(path: Path | str) -> np.ndarray:
    """Read a matrix written by UlamOperator.dump."""
    raw = Path(path).read_bytes()
    rows, cols = np.frombuffer(raw[:16], dtype="<i8")
    return np.frombuffer(raw[16:], dtype="<c16").reshape(int(rows), int(cols)).copy()


def power_iteration(
    a: sparse.spmatrix | np.ndarray,
    tolerance: float = POWER_TOLERANCE,
    max_iterations: int = POWER_MAX_ITERATIONS,
) -> tuple[complex, np.ndarray, int]:
    """
    Leading eigenpair by power iteration from the constant vector.

    The eigenvalue estimate is the Rayleigh quotient v*·A·v of the normalized iterate.

    Returns:
        (eigenvalue, unit eigenvector, iterations)

    Raises:
        PowerIterationStall: If the relative change of the estimate is still above `tolerance` after
            `max_iterations` iterations
    """
    n = a.shape[0]
    vector = np.full(n, 1.0 / math.sqrt(n), dtype=complex)
    value = complex(0.0)
    change = math.inf
    for iteration in range(1, max_iterations + 1):
        image = a @ vector
        norm = np.linalg.norm(image)
        if norm == 0:
            return complex(0.0), vector, iteration
        estimate = complex(np.vdot(vector, image))
        vector = image / norm
        change = abs(estimate - value) / max(abs(estimate), np.finfo(float).tiny)
        value = estimate
        if iteration > 1 and change <= tolerance:
            logger.debug(f"Power iteration converged after {iteration} iterations: {value:.12g}")
            return value, vector, iteration
    raise PowerIterationStall(
        f"Power iteration changed by {change:.3e} relative after {max_iterations} iterations, "
        f"above the tolerance {tolerance:g}"
    )


def omega_grid(dimension: int, radius: float, points: int) -> list[np.ndarray]:
    """Regular grid of twists in [-radius, radius]^d with `points` values per axis, lexicographic."""
    if points < 1:
        raise ValueError(f"Twist grid needs at least one point per axis, got {points}")
    axis = np.linspace(-radius, radius, points) if points > 1 else np.zeros(1)
    return [np.array(w, dtype=float) for w in itertools.product(axis, repeat=dimension)]


def fit_quadratic_form(omegas: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """
    Least-squares symmetric Q with rate(ω) ≈ ω·Qω.

    Raises:
        DegenerateFit: If there are fewer points than free entries of Q
    """
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    d = omegas.shape[1]
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    if omegas.shape[0] < len(pairs):
        raise DegenerateFit(f"Quadratic fit needs at least {len(pairs)} twists, got {omegas.shape[0]}")
    design = np.stack([omegas[:, i] * omegas[:, j] * (1.0 if i == j else 2.0) for i, j in pairs], axis=1)
    coefficients, *_ = np.linalg.lstsq(design, np.asarray(rates, dtype=float), rcond=None)
    q = np.zeros((d, d))
    for (i, j), c in zip(pairs, coefficients, strict=True):
        q[i, j] = q[j, i] = c
    return q


@dataclass(frozen=True)
class UlamSpectrum:
    """Leading eigenvalue curve λ̂(ω) = λ(ω, t)·e^{-h_top t} over a twist grid."""

    t: float
    table: pd.DataFrame
    second_eigenvalue: complex

    @property
    def dimension(self) -> int:
        return sum(1 for c in self.table.columns if c.startswith("omega_"))

    @property
    def omegas(self) -> np.ndarray:
        return self.table[[f"omega_{k}" for k in range(self.dimension)]].to_numpy()

    @property
    def lambda_zero(self) -> float:
        at_zero = self.table[np.all(self.omegas == 0, axis=1)]
        if at_zero.empty:
            raise KeyError("The twist grid does not contain ω = 0")
        return float(at_zero["normalized_modulus"].iloc[0])

    def max_nonzero(self, radius: float = ORDERING_RADIUS) -> float:
        """Largest |λ̂(ω)| over the grid twists with ‖ω‖ >= radius."""
        far = np.linalg.norm(self.omegas, axis=1) >= radius
        return float(self.table.loc[far, "normalized_modulus"].max()) if np.any(far) else math.nan

    def quadratic_form(self, radius: float) -> np.ndarray:
        """Fit of -log(|λ̂(ω)|/λ̂(0))/t against ω·Qω over the twists with 0 < ‖ω‖ <= radius."""
        norms = np.linalg.norm(self.omegas, axis=1)
        near = (norms > 0) & (norms <= radius)
        rates = -np.log(self.table.loc[near, "normalized_modulus"].to_numpy() / self.lambda_zero) / self.t
        return fit_quadratic_form(self.omegas[near], rates)


def frobenius_relative(estimate: np.ndarray, reference: np.ndarray) -> float:
    return float(np.linalg.norm(estimate - reference) / np.linalg.norm(reference))


def ulam_spectrum(
    model: CurvatureModel,
    omegas: Sequence[Sequence[float]],
    t: float,
    cells: int | tuple[int, int, int],
    samples: int,
    seed: int,
    cover: ZdCover,
    mapper: Mapper = map,
    dump_path: Path | str | None = None,
) -> UlamSpectrum:
    """
    Leading eigenvalue curve of the Ulam-discretized twisted transfer operators.

    Args:
        model: Curvature model
        omegas: Twist grid
        t: Transfer time in [1, 3]
        cells: Cells per axis, or the three cell counts; at least 16³ cells in total
        samples: Samples per cell, at least 32
        seed: Master seed
        cover: Cover defining the windings
        mapper: map-like callable for the row assembly
        dump_path: Optional file receiving the dense untwisted matrix, written only up to 4096 active cells

    Returns:
        UlamSpectrum

    Raises:
        PowerIterationStall: If a leading eigenvalue does not converge
    """
    grid = UlamGrid.cube(cells) if isinstance(cells, int) else UlamGrid(cells)
    if grid.size < 16**3:
        raise ValueError(f"Ulam spectrum needs at least 16³ cells, got {grid.shape}")
    if not 1.0 <= t <= 3.0:
        raise ValueError(f"Ulam spectrum needs t in [1, 3], got {t}")
    if samples < 32:
        raise ValueError(f"Ulam spectrum needs at least 32 samples per cell, got {samples}")

    operator = UlamOperator.assemble(model, t, cover, grid, samples, seed, mapper)
    scale = math.exp(-model.h_top * t)
    rows = []
    for omega in omegas:
        omega = np.asarray(omega, dtype=float)
        value, iterations = operator.leading_eigenvalue(omega)
        rows.append(
            {
                **{f"omega_{k}": float(w) for k, w in enumerate(omega)},
                "eigenvalue_real": value.real,
                "eigenvalue_imag": value.imag,
                "normalized_modulus": abs(value) * scale,
                "iterations": iterations,
            }
        )
        logger.debug(f"λ({omega}) = {value:.10g} after {iterations} iterations")
    second = operator.second_eigenvalue() * scale
    if dump_path is not None:
        if operator.size <= DUMP_MAX_ROWS:
            operator.dump(dump_path)
        else:
            logger.info(f"Skipping the dense dump: {operator.size} active cells exceed {DUMP_MAX_ROWS} rows")
    return UlamSpectrum(t, pd.DataFrame(rows), second)
