"""
One function per subcommand.

Every command takes the parsed config, the subcommand's output directory and a mapper, and returns a
CommandResult: named tables (written as <name>.csv), acceptance verdicts and extra manifest entries.
Writing files and choosing exit codes is left to the CLI.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from horocover.checks import (
    Verdict,
    evaluate_clt,
    evaluate_determinant_drift,
    evaluate_drift,
    evaluate_flow_deck_commutation,
    evaluate_jacobi_bounds,
    evaluate_reconstruction,
    evaluate_reduction_growth,
    evaluate_relation,
    evaluate_sigma_consistency,
    evaluate_tau_table,
    evaluate_theorem_a,
    evaluate_theorem_b,
    evaluate_theorem_c,
    evaluate_tiling,
    evaluate_twist_identities,
    evaluate_ulam,
    jacobi_bounds_table,
    reconstruction_errors,
    reduction_growth,
    sample_shifts,
    tau_table,
    twist_identity_residuals,
    verdict,
)
from horocover.cover import CoverPoint, TwistParameter, ZdCover, flow_with_winding, frobenius_vector
from horocover.ergodic import (
    renormalized_integral,
    smoothing_error_constant,
    theorem_a_experiment,
    theorem_b_experiment,
    theorem_c_experiment,
)
from horocover.errors import ConfigError
from horocover.geometry import GENERATOR_ORDER, IsometryMatrix, frame_coordinates, sample_domain_frames
from horocover.renorm import normalizing_time
from horocover.spectral import (
    CovarianceMatrix,
    clt_diagnostic,
    estimate_entropy,
    estimate_sigma,
    omega_grid,
    ulam_spectrum,
)
from horocover.twist import CoverObservable, minimum_grid
from horocover.utils import seed_streams

from .config import ExperimentConfig
from .output import read_table

logger = logging.getLogger(__name__)

Mapper = Callable[[Callable, Sequence], Iterable]

# Harness streams use two-element ids (purpose, k); library batch and cell streams use one-element ids
STREAM_GEOMETRY = 1
STREAM_POINTS = 2
STREAM_JACOBI = 3
STREAM_TWIST = 4
STREAM_CLT = 5
STREAM_ENTROPY = 6

# Reduction-word growth is fitted on unit steps up to this time
GROWTH_TIME = 40

# Second covariance estimate runs this many times longer
SIGMA_CHECK_FACTOR = 2.0
# Longest arc for which t★ is solved by bisection in tau-tables
NORMALIZING_MAX_LENGTH = 100.0
RENORMALIZED_TIMES = (1.0, 2.0, 3.0)
TWIST_TIMES = (0.5, 0.75)
RENORMALIZED_SLACK = 10.0
RENORMALIZED_FLOOR = 1e-9
RENORMALIZED_COLUMNS = ("T", "t", "ramp", "lhs", "lhs_error", "rhs", "rhs_error", "residual", "smoothing_constant")


@dataclass
class CommandResult:
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    extra: dict[str, object] = field(default_factory=dict)

    @property
    def failed(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.severity == "failure"]


# ===== Shared helpers =====


def sample_points(config: ExperimentConfig, cover: ZdCover, count: int | None = None) -> list[CoverPoint]:
    """Volume-random start points in the base copy, from the points stream."""
    rng = seed_streams(config.seed, (STREAM_POINTS, 0))
    frames = sample_domain_frames(rng, count or config.points, cover.group)
    return [CoverPoint.at(IsometryMatrix.from_array(frame), cover.dimension) for frame in frames]


def derived_seed(seed: int, purpose: int, index: int) -> int:
    """Master seed for an independent repetition, drawn from stream (purpose, index)."""
    return int(seed_streams(seed, (purpose, index)).integers(0, 2**62))


def load_sigma(config: ExperimentConfig, output: Path) -> CovarianceMatrix:
    """
    Σ written by estimate-sigma; `output` is the calling subcommand's directory.

    Raises:
        ConfigError: If the file is missing or has the wrong dimension
    """
    path = config.sigma_path(output.parent)
    if not path.is_file():
        raise ConfigError(f"Σ file {path} not found; run estimate-sigma first")
    sigma = CovarianceMatrix.from_frame(read_table(path))
    if sigma.dimension != config.dimension:
        raise ConfigError(f"Σ file {path} has dimension {sigma.dimension}, the cover has {config.dimension}")
    logger.info(f"Loaded Σ from {path}")
    return sigma


def second_observable(f: CoverObservable) -> CoverObservable:
    """Same copies with the bump localized on the fiber (or spread over it, if already localized)."""
    bump = f.bump
    width = math.pi / 2 if bump.full_fiber else math.pi
    return CoverObservable(f.window, f.coefficients, dataclasses.replace(bump, fiber_width=width))


def _sigma_entries(sigma: CovarianceMatrix, prefix: str = "sigma") -> dict[str, object]:
    d = sigma.dimension
    return {f"{prefix}_{i}{j}": f"{sigma.matrix[i, j]:.17g}" for i in range(d) for j in range(d)}


# ===== Subcommands =====


def validate_geometry(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """Surface relation, flow/deck commutation, determinant drift, tiling coverage and word growth."""
    cover = config.cover()
    group = cover.group
    rng = seed_streams(config.seed, (STREAM_GEOMETRY, 0))
    verdicts = [
        evaluate_relation(group),
        evaluate_flow_deck_commutation(cover, rng, config.check_samples),
        evaluate_determinant_drift(group, rng, config.check_samples, config.drift_steps),
    ]
    growth = reduction_growth(group, rng, config.check_samples, GROWTH_TIME)
    verdicts.append(evaluate_tiling(group, seed_streams(config.seed, (STREAM_GEOMETRY, 1))))
    verdicts.append(evaluate_reduction_growth(growth))
    rows = []
    for name in GENERATOR_ORDER:
        matrix = group.generator(name)
        a = matrix.as_array()
        rows.append(
            {
                "generator": name.value,
                "a": a[0, 0],
                "b": a[0, 1],
                "c": a[1, 0],
                "d": a[1, 1],
                "translation_length": matrix.translation_length,
                **{f"deck_{k}": int(v) for k, v in enumerate(cover.abelianization.image([name]))},
            }
        )
    return CommandResult({"generators": pd.DataFrame(rows), "reduction_growth": growth}, verdicts)


def tau_tables(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """τ identities on random points, t★ for short arcs, and Jacobi bounds for random samplers."""
    cover = config.cover()
    model = config.model()
    points = sample_points(config, cover)
    table = tau_table(model, points, config.tau_lengths, config.tau_times, config.tau_step, cover)
    verdicts = evaluate_tau_table(table)

    rows = []
    for index, x in enumerate(points):
        for T in (T for T in config.lengths if T <= NORMALIZING_MAX_LENGTH):
            rows.append(
                {"point": index, "T": T, "t_star": normalizing_time(model, x, T, config.tau_step, cover.group)}
            )
    tables = {"tau": table, "normalizing_time": pd.DataFrame(rows, columns=["point", "T", "t_star"])}

    bounds = jacobi_bounds_table(seed_streams(config.seed, (STREAM_JACOBI, 0)), config.jacobi_samplers)
    tables["jacobi_bounds"] = bounds
    verdicts.extend(evaluate_jacobi_bounds(bounds))
    return CommandResult(tables, verdicts, {"curvature": model.describe()})


def winding_orbit(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """Deck coordinate along one geodesic orbit at unit times, and the winding of the whole segment."""
    cover = config.cover()
    start = sample_points(config, cover, 1)[0]
    steps = math.ceil(config.winding_time)
    x = start
    rows = []
    for k in range(steps + 1):
        t = min(float(k), config.winding_time)
        if k > 0:
            x, _ = flow_with_winding(x, t - rows[-1]["t"], cover)
        u, v, theta = frame_coordinates(x.base.as_array())
        decks = {f"deck_{i}": n for i, n in enumerate(x.deck)}
        rows.append({"t": t, "u": float(u), "v": float(v), "theta": float(theta), **decks})
    total = frobenius_vector(start, config.winding_time, cover)
    stepped = np.array(x.deck) - np.array(start.deck)
    matches = bool(np.array_equal(np.array(total.values), stepped))
    result = verdict(
        "winding_additivity",
        matches,
        f"Winding over t = {config.winding_time:g} is {total.values} in one call, {tuple(stepped)} step by step",
    )
    extra = {f"winding_{i}": v for i, v in enumerate(total.values)}
    return CommandResult({"orbit": pd.DataFrame(rows)}, [result], extra)


def estimate_sigma_command(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """Σ̂ at sigma_time (written as sigma.csv) and at twice that time as a consistency check."""
    cover = config.cover()
    model = config.model()
    sigma = estimate_sigma(model, config.sigma_time, config.sigma_samples, config.seed, cover, mapper=mapper)
    check = estimate_sigma(
        model, SIGMA_CHECK_FACTOR * config.sigma_time, config.sigma_samples, config.seed, cover, mapper=mapper
    )
    verdicts = [evaluate_sigma_consistency(sigma, check), evaluate_drift(sigma)]
    extra = {**_sigma_entries(sigma), "sigma_drift": f"{sigma.drift:.6g}"}
    return CommandResult({"sigma": sigma.to_frame(), "sigma_check": check.to_frame()}, verdicts, extra)


def clt_test(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """Whitened KS tests at clt_time for clt_seeds independent seeds."""
    cover = config.cover()
    model = config.model()
    sigma = load_sigma(config, output)
    reports = []
    rows = []
    for k in range(config.clt_seeds):
        seed = derived_seed(config.seed, STREAM_CLT, k)
        report = clt_diagnostic(model, config.clt_time, config.clt_samples, sigma, seed, cover, mapper=mapper)
        reports.append(report)
        rows.append(
            {
                "repetition": k,
                "t": report.time,
                "samples": report.samples,
                **{f"ks_{i}": s for i, s in enumerate(report.ks_statistics)},
                **{f"p_value_{i}": p for i, p in enumerate(report.p_values)},
                "covariance_error": report.covariance_error,
                "operator_error": report.operator_error,
            }
        )
    return CommandResult({"clt": pd.DataFrame(rows)}, evaluate_clt(reports), _sigma_entries(sigma))


def ulam_spectrum_command(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """Leading eigenvalue curve over the ω-grid; the untwisted matrix is dumped when small enough."""
    cover = config.cover()
    model = config.model()
    extra: dict[str, object] = {}
    if not model.is_constant and model.entropy is None:
        entropy = estimate_entropy(model, derived_seed(config.seed, STREAM_ENTROPY, 0), group=cover.group)
        model = model.with_entropy(entropy.value)
        extra.update({"entropy": f"{entropy.value:.12g}", "entropy_error": f"{entropy.standard_error:.3g}"})

    omegas = omega_grid(config.dimension, config.omega_radius, config.omega_points)
    dump = output / "matrix.bin"
    output.mkdir(parents=True, exist_ok=True)
    dump.unlink(missing_ok=True)
    spectrum = ulam_spectrum(
        model, omegas, config.ulam_time, config.ulam_cells, config.ulam_samples, config.seed, cover, mapper, dump
    )

    sigma_path = config.sigma_path(output.parent)
    sigma = CovarianceMatrix.from_frame(read_table(sigma_path)).matrix if sigma_path.is_file() else None
    verdicts = evaluate_ulam(spectrum, sigma, config.fit_radius)
    extra.update(
        {
            "lambda_zero": f"{spectrum.lambda_zero:.12g}",
            "second_eigenvalue_modulus": f"{abs(spectrum.second_eigenvalue):.12g}",
            "matrix_dump": dump.name if dump.is_file() else "none",
        }
    )
    return CommandResult({"spectrum": spectrum.table}, verdicts, extra)


def theorem_a(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """Ergodic integrals on the cover against the asymptotic prediction, plus the renormalized identity."""
    cover = config.cover()
    model = config.model()
    sigma = load_sigma(config, output)
    f = config.observable()
    points = sample_points(config, cover)
    table = theorem_a_experiment(f, points, config.lengths, sigma, cover, config.step, model, mapper)
    verdicts = evaluate_theorem_a(table)

    T = min(config.lengths)
    rows = []
    # The smoothing window needs e^{-t}T >= 2B with B = e^{-δt/3}
    fitting = [t for t in RENORMALIZED_TIMES if math.exp(-t) * T >= 2.0 * math.exp(-config.delta * t / 3.0)]
    for t in fitting:
        identity = renormalized_integral(f, points[0], T, t, config.step, cover, model, config.delta)
        constant = smoothing_error_constant(f, points[0], T, t, config.step, cover, model, config.delta)
        rows.append({**dataclasses.asdict(identity), "residual": identity.residual, "smoothing_constant": constant})
    renormalized = pd.DataFrame(rows, columns=[*RENORMALIZED_COLUMNS])
    tables = {"theorem_a": table, "renormalized": renormalized}
    if renormalized.empty:
        logger.warning(f"No renormalization time fits the smoothing window on T = {T:g}; skipping the identity check")
        return CommandResult(tables, verdicts, _sigma_entries(sigma))
    allowed = RENORMALIZED_SLACK * renormalized["lhs_error"] + renormalized["rhs_error"] + RENORMALIZED_FLOOR
    worst = float((renormalized["residual"] - allowed).max())
    verdicts.append(
        verdict(
            "renormalized_identity",
            worst <= 0,
            f"Largest excess of the renormalized identity residual over its quadrature allowance: {worst:.3e} "
            f"(T = {T:g}, {len(renormalized)} times)",
            worst_residual=f"{float(renormalized['residual'].max()):.6e}",
        )
    )
    return CommandResult(tables, verdicts, _sigma_entries(sigma))


def theorem_b(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """Pushed horocycle arcs for the configured observable and its fiber-localized variant."""
    cover = config.cover()
    model = config.model()
    sigma = load_sigma(config, output)
    points = sample_points(config, cover)
    frames = []
    for label, f in (("base", config.observable()), ("fiber", second_observable(config.observable()))):
        table = theorem_b_experiment(
            f, points, config.arc_length, config.times, sigma, cover, config.step, model, mapper
        )
        table.insert(0, "observable", label)
        frames.append(table)
    table = pd.concat(frames, ignore_index=True)
    return CommandResult({"theorem_b": table}, [evaluate_theorem_b(table)], _sigma_entries(sigma))


def theorem_c(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """Deviation of ergodic averages on the surface and its fitted power law."""
    cover = config.cover()
    points = sample_points(config, cover)
    table = theorem_c_experiment(
        config.surface_observable(), points, config.lengths, cover, config.step, config.model(), mapper
    )
    verdicts, fit = evaluate_theorem_c(table)
    extra = {}
    if fit is not None:
        extra = {
            "deviation_exponent": f"{fit.exponent:.12g}",
            "deviation_r_squared": f"{fit.r_squared:.12g}",
            "deviation_points": fit.points,
        }
    return CommandResult({"theorem_c": table}, verdicts, extra)


def reconstruct_check(config: ExperimentConfig, output: Path, mapper: Mapper = map) -> CommandResult:
    """Twist reconstruction around the observable's window and the twist identities at random ω."""
    cover = config.cover()
    model = config.model()
    f = config.observable()
    rng = seed_streams(config.seed, (STREAM_TWIST, 0))
    bases = sample_points(config, cover)
    spread = f.width + 1
    anchors = np.array(f.window)
    points = []
    for x in bases:
        anchor = anchors[rng.integers(0, len(anchors))]
        offset = rng.integers(-spread, spread + 1, cover.dimension)
        points.append(x.shifted([int(v) for v in anchor + offset]))

    reconstruction = reconstruction_errors(f, points, config.reconstruct_grid)
    verdicts = [evaluate_reconstruction(reconstruction, minimum_grid(f))]

    rows = []
    for k in range(config.twist_samples):
        omega = TwistParameter(tuple(float(w) for w in rng.uniform(-0.5, 0.5, cover.dimension)))
        shifts = sample_shifts(rng, len(points), cover.dimension)
        residuals = twist_identity_residuals(f, omega, points, shifts, TWIST_TIMES, cover, model)
        rows.append({"sample": k, **{f"omega_{i}": w for i, w in enumerate(omega.values)}, **residuals})
    twist = pd.DataFrame(rows)
    verdicts.extend(evaluate_twist_identities(twist))
    extra = {"reconstruct_grid": config.reconstruct_grid, "minimum_grid": minimum_grid(f)}
    return CommandResult({"reconstruction": reconstruction, "twist_identities": twist}, verdicts, extra)


COMMANDS: dict[str, Callable[[ExperimentConfig, Path, Mapper], CommandResult]] = {
    "validate-geometry": validate_geometry,
    "tau-tables": tau_tables,
    "winding-orbit": winding_orbit,
    "estimate-sigma": estimate_sigma_command,
    "clt-test": clt_test,
    "ulam-spectrum": ulam_spectrum_command,
    "theorem-a": theorem_a,
    "theorem-b": theorem_b,
    "theorem-c": theorem_c,
    "reconstruct-check": reconstruct_check,
}


def list_commands() -> list[str]:
    return list(COMMANDS.keys())
