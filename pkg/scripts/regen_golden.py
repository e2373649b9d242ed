#!/usr/bin/env python3
"""Regenerate the golden reference CSVs (contours, collapse table,
exponent fits) under golden/.  Deterministic: running twice produces
byte-identical files."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from invsq.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "golden"
    sys.exit(main(["regen-golden", "--out", out]))
