#!/usr/bin/env python3
"""Sweep the flow diagram data: constant-C+/C- contours plus the exact
flow of gamma from a grid of starting couplings, written as plot-ready
CSVs (no rendering here)."""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from invsq import rgflow
from invsq.cli import write_csv
from invsq.core import derived_constants


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=-0.1875)
    ap.add_argument("--out", default="golden")
    args = ap.parse_args()
    p = derived_constants(args.alpha)
    out = Path(args.out)

    xi = np.geomspace(1e-5, 0.6, 80)
    rows = []
    for ratio in (0.5, 1.0, 2.0, 4.0, 8.0):
        for (x, g) in rgflow.contour_constant_ratio(p, ratio, xi):
            rows.append((x, g, ratio))
    write_csv(out / "flow_contours.csv",
              [f"alpha = {args.alpha}", "contours of constant C+/C-"],
              ["xi (dimensionless)", "g (dimensionless)", "ratio"], rows)

    rows = []
    for gamma0 in np.linspace(p.nu_minus + 0.02, p.nu_plus - 0.02, 9):
        for b1 in np.geomspace(1.0, 1e-4, 33):
            st = rgflow.flow(p, float(gamma0), 1.0, float(b1))
            rows.append((gamma0, st.b, st.gamma, st.g, st.u))
    write_csv(out / "flow_trajectories.csv",
              [f"alpha = {args.alpha}", "exact RG trajectories gamma(b)"],
              ["gamma0", "b", "gamma", "g", "u"], rows)
    print(f"flow portrait written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
