"""CSV tables and flat key = value manifests."""

from __future__ import annotations

import logging
import platform
import time
from collections.abc import Mapping
from importlib import metadata
from pathlib import Path

import pandas as pd

from horocover.errors import ConfigError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
MANIFEST_NAME = "manifest.txt"
CSV_SCHEMA_VERSION = 1


def write_table(table: pd.DataFrame, path: Path | str) -> Path:
    """Write a table as CSV with a header row and 17 significant digits for floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(table)} rows to {path}")
    return path


def read_table(path: Path | str) -> pd.DataFrame:
    return pd.read_csv(path)


def package_versions() -> dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in ("horocover", "numpy", "scipy", "pandas"):
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def write_manifest(path: Path | str, entries: Mapping[str, object]) -> Path:
    """Write `key = value` lines in the given order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{key} = {value}" for key, value in entries.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Wrote manifest {path}")
    return path


def read_manifest(path: Path | str) -> dict[str, str]:
    entries = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = (part.strip() for part in line.split("=", 1))
            entries[key] = value
    return entries


def check_resume(directory: Path | str, config_hash: str) -> None:
    """
    Refuse to write into a directory whose manifest was produced by a different config.

    Raises:
        ConfigError: On a config hash mismatch
    """
    manifest = Path(directory) / MANIFEST_NAME
    if not manifest.is_file():
        return
    recorded = read_manifest(manifest).get("config_hash")
    if recorded is not None and recorded != config_hash:
        raise ConfigError(
            f"{manifest} was written by config {recorded[:12]}, current config is {config_hash[:12]}; "
            f"use another output directory or remove the old results"
        )


class RunTimer:
    """Wall time of a run."""

    def __init__(self):
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start


def manifest_entries(
    subcommand: str, config_hash: str, seed: int, wall_time: float, extra: Mapping[str, object] | None = None
) -> dict[str, object]:
    entries: dict[str, object] = {
        "subcommand": subcommand,
        "config_hash": config_hash,
        "seed": seed,
        "csv_schema": CSV_SCHEMA_VERSION,
    }
    entries.update({f"version_{name}": version for name, version in package_versions().items()})
    entries["wall_time"] = f"{wall_time:.3f}"
    entries.update(extra or {})
    return entries
