"""Main file for the jetcheck verification engine, e.g. ``py -m src.main catalog run all``."""

import sys

from src.jetcheck.cli.app import main

if __name__ == "__main__":
    sys.exit(main())
