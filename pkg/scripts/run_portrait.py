#!/usr/bin/env python3
"""Generate the triangle-example phase portrait CSV.

Equivalent to `clfstab portrait` with the default config; kept as a
script so the experiment setup is editable in one place.
"""

import sys

from clfstab.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "portrait.csv"
    sys.exit(main(["portrait", "--out", out]))
