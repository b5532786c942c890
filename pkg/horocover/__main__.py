import sys

from horocover.harness.cli import main

sys.exit(main())
