"""
Flat key = value experiment configuration.

    # comments start with '#'
    seed = 7
    projection = d2                 # preset name, or rows: 1 0 0 0; 0 0 1 0
    curvature = sinusoidal          # preset name, or: sampler <mean> <amplitude> <frequency>
    lengths = 100 1000 10000

Lists are whitespace separated and matrix rows are separated by ';'. `seed` is required, every other key
has a default. `to_text` writes every key with floats in repr form, so parsing it back gives an equal
config and the same text.
"""

from __future__ import annotations

import hashlib
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, fields
from pathlib import Path

from horocover.cover import ZdCover
from horocover.errors import ConfigError
from horocover.presets import CURVATURE_PRESETS, PROJECTIONS
from horocover.renorm import CurvatureModel, build_curvature_model
from horocover.twist import BaseBump, CoverObservable, SurfaceObservable

logger = logging.getLogger(__name__)

THREADS_ENV = "HOROCOVER_THREADS"

DEFAULT_LENGTHS = tuple(10.0 ** (2 + k / 2) for k in range(9))


def _parse_int(raw: str) -> int:
    return int(raw)


def _parse_float(raw: str) -> float:
    return float(raw)


def _parse_str(raw: str) -> str:
    return raw


def _parse_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(v) for v in raw.split())


def _parse_rows(raw: str) -> tuple[tuple[int, ...], ...]:
    if raw in PROJECTIONS:
        return PROJECTIONS[raw]
    return tuple(tuple(int(v) for v in row.split()) for row in raw.split(";") if row.strip())


def _format_rows(rows: tuple[tuple[int, ...], ...]) -> str:
    return "; ".join(" ".join(str(v) for v in row) for row in rows)


def _format_floats(values: tuple[float, ...]) -> str:
    return " ".join(repr(float(v)) for v in values)


# key -> (parser, formatter)
_CODECS: dict[str, tuple[Callable[[str], object], Callable[[object], str]]] = {
    "int": (_parse_int, str),
    "float": (_parse_float, lambda v: repr(float(v))),
    "str": (_parse_str, str),
    "floats": (_parse_floats, _format_floats),
    "rows": (_parse_rows, _format_rows),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Every knob of an experiment run.

    Raises:
        ConfigError: If a value is out of its documented range; the message names the key
    """

    seed: int
    # Cover and curvature
    projection: tuple[tuple[int, ...], ...] = PROJECTIONS["d1"]
    curvature: str = "constant"
    # Observable: bump on the base tile, copies on `window` with `coefficients` (empty: base copy only)
    bump_center: tuple[float, ...] = (0.0, 0.0)
    bump_radius: float = 0.5
    fiber_center: float = 0.0
    fiber_width: float = math.pi
    window: tuple[tuple[int, ...], ...] = ()
    coefficients: tuple[float, ...] = ()
    # Schedules
    lengths: tuple[float, ...] = DEFAULT_LENGTHS
    times: tuple[float, ...] = (6.0, 8.0, 10.0, 12.0)
    arc_length: float = 1.0
    points: int = 5
    # Quadrature
    step: float = 0.0625
    tau_step: float = 0.05
    delta: float = 0.3
    # Renormalization tables
    tau_lengths: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    tau_times: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    jacobi_samplers: int = 10000
    # Geometry checks and orbits
    check_samples: int = 1000
    drift_steps: int = 1000
    winding_time: float = 10.0
    # Covariance and CLT
    sigma_time: float = 20.0
    sigma_samples: int = 10000
    clt_time: float = 40.0
    clt_samples: int = 10000
    clt_seeds: int = 5
    # Ulam
    ulam_cells: int = 24
    ulam_samples: int = 32
    ulam_time: float = 2.0
    omega_radius: float = 0.5
    omega_points: int = 11
    fit_radius: float = 0.25
    # Twist reconstruction
    reconstruct_grid: int = 3
    twist_samples: int = 3
    # Run
    threads: int = 1
    output: str = "results"
    sigma_file: str = ""

    def __post_init__(self):
        d = len(self.projection)
        self._require(d >= 1 and len({len(r) for r in self.projection}) == 1, "projection", "needs rows of equal length")
        self._require(all(len(r) == 4 for r in self.projection), "projection", "rows must have 4 entries")
        self._require(self.seed >= 0, "seed", "must be non-negative")
        try:
            build_curvature_model(self._curvature_params())
        except (KeyError, ValueError) as e:
            raise ConfigError(f"Invalid value for key 'curvature': {e}") from e
        self._require(len(self.bump_center) == 2, "bump_center", "needs two disk coordinates")
        self._require(self.bump_radius > 0, "bump_radius", "must be positive")
        self._require(self.fiber_width > 0, "fiber_width", "must be positive")
        self._require(len(self.window) == len(self.coefficients), "coefficients", "needs one value per window row")
        self._require(all(len(r) == d for r in self.window), "window", f"rows must have {d} entries")
        self._require(len(self.lengths) > 0 and min(self.lengths) > math.e, "lengths", "must all exceed e")
        self._require(len(self.times) > 0 and min(self.times) >= 0, "times", "must be non-negative")
        self._require(max(self.times, default=0.0) <= 14.0, "times", "must not exceed 14")
        self._require(self.arc_length > 0, "arc_length", "must be positive")
        self._require(self.points >= 1, "points", "must be at least 1")
        self._require(0 < self.step <= self.bump_radius / 8, "step", "must lie in (0, bump_radius/8]")
        self._require(0 < self.tau_step <= 0.1, "tau_step", "must lie in (0, 0.1]")
        self._require(self.delta > 0, "delta", "must be positive")
        self._require(len(self.tau_lengths) > 0 and min(self.tau_lengths) > 0, "tau_lengths", "must be positive")
        self._require(len(self.tau_times) > 0 and min(self.tau_times) >= 0, "tau_times", "must be non-negative")
        self._require(self.jacobi_samplers >= 1, "jacobi_samplers", "must be at least 1")
        self._require(self.check_samples >= 1, "check_samples", "must be at least 1")
        self._require(self.drift_steps >= 1, "drift_steps", "must be at least 1")
        self._require(self.winding_time > 0, "winding_time", "must be positive")
        self._require(self.sigma_time >= 20, "sigma_time", "must be at least 20")
        self._require(self.sigma_samples >= 1000, "sigma_samples", "must be at least 1000")
        self._require(self.clt_time > 0, "clt_time", "must be positive")
        self._require(self.clt_samples >= 1, "clt_samples", "must be at least 1")
        self._require(self.clt_seeds >= 1, "clt_seeds", "must be at least 1")
        self._require(self.ulam_cells >= 16, "ulam_cells", "must be at least 16")
        self._require(self.ulam_samples >= 32, "ulam_samples", "must be at least 32")
        self._require(1 <= self.ulam_time <= 3, "ulam_time", "must lie in [1, 3]")
        self._require(self.omega_radius > 0, "omega_radius", "must be positive")
        self._require(self.omega_points >= 1, "omega_points", "must be at least 1")
        self._require(0 < self.fit_radius <= self.omega_radius, "fit_radius", "must lie in (0, omega_radius]")
        self._require(self.reconstruct_grid >= 1, "reconstruct_grid", "must be at least 1")
        self._require(self.twist_samples >= 1, "twist_samples", "must be at least 1")
        self._require(self.threads >= 1, "threads", "must be at least 1")
        self._require(bool(self.output), "output", "must not be empty")
        try:
            self.observable()
        except ValueError as e:
            raise ConfigError(f"Invalid observable parameters: {e}") from e

    @staticmethod
    def _require(condition: bool, key: str, message: str) -> None:
        if not condition:
            raise ConfigError(f"Invalid value for key '{key}': {message}")

    # ===== Parsing =====

    @staticmethod
    def _kind(name: str) -> str:
        kinds = {
            "seed": "int",
            "projection": "rows",
            "window": "rows",
            "curvature": "str",
            "output": "str",
            "sigma_file": "str",
            "bump_center": "floats",
            "coefficients": "floats",
            "lengths": "floats",
            "times": "floats",
            "tau_lengths": "floats",
            "tau_times": "floats",
        }
        if name in kinds:
            return kinds[name]
        default = next(f for f in fields(ExperimentConfig) if f.name == name).default
        return "int" if isinstance(default, int) else "float"

    @classmethod
    def from_text(cls, text: str) -> ExperimentConfig:
        """
        Parse configuration text.

        Raises:
            ConfigError: On syntax errors, unknown or duplicate keys, a missing seed, or bad values
        """
        known = {f.name for f in fields(cls)}
        values: dict[str, object] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            content = line.split("#", 1)[0].strip()
            if not content:
                continue
            if "=" not in content:
                raise ConfigError(f"Line {number}: expected 'key = value', got '{content}'")
            key, raw = (part.strip() for part in content.split("=", 1))
            if key not in known:
                raise ConfigError(f"Line {number}: unknown key '{key}'. Known keys: {', '.join(sorted(known))}")
            if key in values:
                raise ConfigError(f"Line {number}: key '{key}' given twice")
            parser, _ = _CODECS[cls._kind(key)]
            try:
                values[key] = parser(raw)
            except ValueError as e:
                raise ConfigError(f"Line {number}: cannot parse key '{key}' from '{raw}': {e}") from e
        if "seed" not in values:
            raise ConfigError("Missing required key 'seed'")
        return cls(**values)

    @classmethod
    def load(cls, path: Path | str) -> ExperimentConfig:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        config = cls.from_text(path.read_text(encoding="utf-8"))
        logger.info(f"Loaded config {path} (hash {config.content_hash[:12]})")
        return config

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            _, formatter = _CODECS[self._kind(f.name)]
            lines.append(f"{f.name} = {formatter(getattr(self, f.name))}".rstrip())
        return "\n".join(lines) + "\n"

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    # ===== Domain objects =====

    @property
    def dimension(self) -> int:
        return len(self.projection)

    def _curvature_params(self) -> dict | str:
        parts = self.curvature.split()
        if len(parts) == 1:
            if parts[0] not in CURVATURE_PRESETS:
                raise KeyError(f"Unknown curvature preset '{parts[0]}'")
            return parts[0]
        if parts[0] != "sampler" or len(parts) not in (3, 4):
            raise ValueError(f"Expected 'sampler <mean> <amplitude> [<frequency>]', got '{self.curvature}'")
        params = {"kind": "sampler", "mean": float(parts[1]), "amplitude": float(parts[2])}
        if len(parts) == 4:
            params["frequency"] = float(parts[3])
        return params

    def model(self) -> CurvatureModel:
        return build_curvature_model(self._curvature_params())

    def cover(self) -> ZdCover:
        return ZdCover.from_rows(self.projection)

    def bump(self) -> BaseBump:
        return BaseBump(complex(*self.bump_center), self.bump_radius, self.fiber_center, self.fiber_width)

    def observable(self) -> CoverObservable:
        if not self.window:
            return CoverObservable.single(self.bump(), self.dimension)
        return CoverObservable(self.window, self.coefficients, self.bump())

    def surface_observable(self) -> SurfaceObservable:
        return SurfaceObservable(self.bump())

    def sigma_path(self, output: Path | str | None = None) -> Path:
        """Σ file: `sigma_file` if set, else estimate-sigma/sigma.csv under the output directory."""
        if self.sigma_file:
            return Path(self.sigma_file)
        return Path(output or self.output) / "estimate-sigma" / "sigma.csv"
