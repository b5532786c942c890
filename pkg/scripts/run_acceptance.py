"""
Run a sequence of horocover subcommands for one config and summarize their exit codes.

With --reproduce N every subcommand is also re-run with N workers into a sibling directory and the CSV files
of both runs are compared byte for byte.
"""

import hashlib
import logging
import sys
from pathlib import Path

# Add parent directory to path to import horocover
sys.path.insert(0, str(Path(__file__).parent.parent))

from horocover.harness import ExperimentConfig
from horocover.harness.cli import EXIT_OK, run
from horocover.harness.commands import list_commands

logger = logging.getLogger(__name__)

# estimate-sigma must precede the commands that read the Σ file
DEFAULT_SEQUENCE = [
    "validate-geometry",
    "tau-tables",
    "reconstruct-check",
    "winding-orbit",
    "estimate-sigma",
    "clt-test",
    "ulam-spectrum",
    "theorem-c",
    "theorem-a",
    "theorem-b",
]


def csv_digests(directory: Path) -> dict[str, str]:
    """sha256 of every CSV file under `directory`, keyed by relative path."""
    return {
        str(path.relative_to(directory)): hashlib.sha256(path.read_bytes()).hexdigest()
        for path in sorted(directory.rglob("*.csv"))
    }


def compare_runs(first: Path, second: Path) -> list[str]:
    """Relative paths of CSV files that differ or exist in only one of the two runs."""
    a, b = csv_digests(first), csv_digests(second)
    return sorted(name for name in a.keys() | b.keys() if a.get(name) != b.get(name))


def run_sequence(config: Path, out: Path, commands: list[str], threads: int | None, keep_going: bool) -> dict:
    codes = {}
    for name in commands:
        codes[name] = run(name, config, out, threads)
        if codes[name] != EXIT_OK and not keep_going:
            logger.error(f"{name} exited with {codes[name]}; stopping (use --keep-going to continue)")
            break
    return codes


def main():
    """Main function to run the acceptance sequence."""
    import argparse

    parser = argparse.ArgumentParser(description="Run horocover subcommands in acceptance order")
    parser.add_argument(
        "--config",
        type=Path,
        default=Path(__file__).parent.parent / "configs" / "default.conf",
        help="Configuration file (default: configs/default.conf)",
    )
    parser.add_argument(
        "--out",
        type=Path,
        help="Output root (default: the config's output key)",
    )
    parser.add_argument(
        "--only",
        type=str,
        help=f"Comma-separated subcommands to run, in the given order (choices: {', '.join(list_commands())})",
    )
    parser.add_argument(
        "--threads",
        type=int,
        help="Worker processes for the main run",
    )
    parser.add_argument(
        "--reproduce",
        type=int,
        metavar="N",
        help="Re-run every subcommand with N workers and compare CSV bytes",
    )
    parser.add_argument(
        "--keep-going",
        action="store_true",
        help="Continue after a subcommand fails",
    )

    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    commands = [c.strip() for c in args.only.split(",")] if args.only else DEFAULT_SEQUENCE
    unknown = [c for c in commands if c not in list_commands()]
    if unknown:
        parser.error(f"Unknown subcommand(s): {', '.join(unknown)}")

    out = args.out or Path(ExperimentConfig.load(args.config).output)
    codes = run_sequence(args.config, out, commands, args.threads, args.keep_going)

    mismatches = []
    if args.reproduce:
        repeat = out.with_name(f"{out.name}-threads{args.reproduce}")
        run_sequence(args.config, repeat, list(codes), args.reproduce, keep_going=True)
        mismatches = compare_runs(out, repeat)

    logger.info("=" * 80)
    logger.info(f"Acceptance summary for {args.config}")
    logger.info("=" * 80)
    for name, code in codes.items():
        logger.info(f"{name:<20} {'ok' if code == EXIT_OK else f'exit {code}'}")
    skipped = [c for c in commands if c not in codes]
    if skipped:
        logger.warning(f"Not run: {', '.join(skipped)}")
    if args.reproduce:
        if mismatches:
            logger.error(f"{len(mismatches)} CSV file(s) differ between worker counts: {', '.join(mismatches)}")
        else:
            logger.info(f"Every CSV file is byte-identical at {args.threads or 'default'} and {args.reproduce} workers")

    failed = skipped or mismatches or any(code != EXIT_OK for code in codes.values())
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
