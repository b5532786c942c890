"""
Command line entry point.

    horocover <subcommand> --config <path> [--out <dir>] [--threads N] [-v]

Each subcommand writes its tables as CSV files and a manifest.txt into <out>/<subcommand>/. Exit codes:
0 on success, 2 for configuration errors and failed validation checks, 3 when a numeric guard trips.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import pandas as pd

from horocover.errors import ConfigError, NumericGuardError, ValidationError

from .commands import COMMANDS, CommandResult, list_commands
from .config import THREADS_ENV, ExperimentConfig
from .output import MANIFEST_NAME, RunTimer, check_resume, manifest_entries, write_manifest, write_table
from .parallel import make_mapper, resolve_threads

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3


def _verdict_table(result: CommandResult) -> pd.DataFrame:
    return pd.DataFrame(
        [{"check": v.name, "passed": v.passed, "severity": v.severity, "message": v.message} for v in result.verdicts],
        columns=["check", "passed", "severity", "message"],
    )


def _write_outputs(
    result: CommandResult, directory: Path, subcommand: str, config: ExperimentConfig, threads: int, wall_time: float
) -> None:
    for name, table in result.tables.items():
        write_table(table, directory / f"{name}.csv")
    write_table(_verdict_table(result), directory / "checks.csv")
    extra: dict[str, object] = {"threads": threads, **result.extra}
    for v in result.verdicts:
        extra.update(v.manifest_entries())
    write_manifest(
        directory / MANIFEST_NAME, manifest_entries(subcommand, config.content_hash, config.seed, wall_time, extra)
    )


def run(subcommand: str, config_path: Path | str, out: Path | str | None = None, threads: int | None = None) -> int:
    """
    Run one subcommand and write its outputs.

    Args:
        subcommand: One of the registered subcommand names
        config_path: Configuration file
        out: Output root (default: the config's `output` key)
        threads: Worker count overriding the environment and the config

    Returns:
        Process exit code
    """
    if subcommand not in COMMANDS:
        logger.error(f"Unknown subcommand '{subcommand}'. Available subcommands: {', '.join(list_commands())}")
        return EXIT_INVALID
    try:
        config = ExperimentConfig.load(config_path)
        workers = resolve_threads(threads, config.threads)
        directory = Path(out or config.output) / subcommand
        check_resume(directory, config.content_hash)

        logger.info("=" * 80)
        logger.info(f"{subcommand}: seed {config.seed}, {workers} worker(s), output {directory}")
        logger.info("=" * 80)
        timer = RunTimer()
        result = COMMANDS[subcommand](config, directory, make_mapper(workers))
        _write_outputs(result, directory, subcommand, config, workers, timer.elapsed)
    except (ConfigError, ValidationError) as e:
        logger.error(f"{subcommand}: {e}")
        return EXIT_INVALID
    except NumericGuardError as e:
        logger.error(f"{subcommand}: numeric guard {type(e).__name__}: {e}")
        return EXIT_NUMERIC
    except ValueError as e:
        logger.error(f"{subcommand}: invalid input: {e}")
        return EXIT_INVALID

    for v in result.verdicts:
        log = logger.info if v.passed else logger.warning
        log(f"[{'pass' if v.passed else 'FAIL'}] {v.name}: {v.message}")
    if result.failed:
        logger.error(f"{subcommand}: {len(result.failed)} check(s) failed: {', '.join(v.name for v in result.failed)}")
        return EXIT_INVALID
    logger.info(f"{subcommand} finished in {timer.elapsed:.1f}s")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horocover",
        description="Geodesic and horocycle flow experiments on Z^d covers of the genus-2 octagon surface",
    )
    parser.add_argument("subcommand", choices=list_commands(), help="Experiment to run")
    parser.add_argument("--config", type=Path, required=True, help="Configuration file (key = value lines)")
    parser.add_argument("--out", type=Path, help="Output root (default: the config's output key)")
    parser.add_argument(
        "--threads",
        type=int,
        help=f"Worker processes (default: ${THREADS_ENV}, then the config's threads key)",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for debug logging")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return run(args.subcommand, args.config, args.out, args.threads)


if __name__ == "__main__":
    sys.exit(main())
