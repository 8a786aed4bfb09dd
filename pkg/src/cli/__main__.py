"""`python -m src.cli` runs the pidfuse command line."""

import sys

from src.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
