#!/usr/bin/env python3
"""Penetration depth of the smooth flow into the wall as ell and hbar shrink together."""

import argparse

from fuzzybox.dynamics import classical_limit_study, default_limit_sequence
from fuzzybox.quantizer import PhaseState
from fuzzybox.windowfn import Geometry

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=6)
    ap.add_argument("--p0", type=float, default=1.0)
    ap.add_argument("--T", type=float, default=8.0)
    args = ap.parse_args()
    rows = classical_limit_study(PhaseState(5.0, args.p0), Geometry.bounded(0.0, 10.0),
                                 default_limit_sequence(args.count), args.T)
    print(f"{'n':>2} {'ell':>9} {'hbar':>10} {'interior dev':>13} {'depth':>10} {'ratio':>6} {'max|F|':>10}")
    prev = None
    for r in rows:
        ratio = "" if prev is None else f"{prev / r.penetration_depth:.2f}"
        print(f"{r.n:>2} {r.ell:>9.5f} {r.hbar:>10.3e} {r.interior_deviation:>13.2e} "
              f"{r.penetration_depth:>10.4f} {ratio:>6} {r.max_abs_force:>10.3e}")
        prev = r.penetration_depth
