#!/usr/bin/env python3
"""Run the full verification battery (CLF, SCP, tradeoff, epsilon limit)
on the built-in triangle example and exit nonzero on any failure."""

import sys

from clfstab.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify"] + sys.argv[1:]))
