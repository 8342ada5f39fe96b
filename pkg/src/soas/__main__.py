"""Allow `python -m soas` as an alias for the `soas` script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
