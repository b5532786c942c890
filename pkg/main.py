"""Run a horocover subcommand from a source checkout: python main.py <subcommand> --config <path>."""

import sys

from horocover.harness.cli import main

if __name__ == "__main__":
    sys.exit(main())
