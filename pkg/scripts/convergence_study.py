#!/usr/bin/env python3
"""Grid and time-step convergence of the discretised operators and the RK4 flow.

Prints two tables: the oracle-vs-matrix discrepancy for each observable as the
grid spacing halves, and the relative energy drift of a wall-bouncing
trajectory as the time step halves.
"""

import argparse

from fuzzybox import cli
from fuzzybox.dynamics import integrate, semiclassical_system
from fuzzybox.quantizer import PhaseState
from fuzzybox.windowfn import Geometry, QuantizationParams


def grid_table(geom, params, levels):
    prev = None
    print("h/ell  " + "  ".join(f"{n:>28s}" for n in ("momentum", "kinetic[anticommutator_half]",
                                                       "kinetic[p_sandwich]")))
    for k in range(levels):
        h = params.ell / (20 * 2**k)
        worst = {}
        for name, _, d, _ in cli.quantize_check_rows(geom, params, h):
            worst[name] = max(worst.get(name, 0.0), d)
        cells = []
        for name in ("momentum", "kinetic[anticommutator_half]", "kinetic[p_sandwich]"):
            r = f" (x{prev[name] / worst[name]:.2f})" if prev else ""
            cells.append(f"{worst[name]:.3e}{r}".rjust(28))
        print(f"1/{20 * 2**k:<4d} " + "  ".join(cells))
        prev = worst


def drift_table(geom, params, levels, T):
    sys_ = semiclassical_system(geom, params)
    prev = None
    print("\ndt          drift        ratio")
    for k in range(levels):
        dt = 5e-4 / 2**k
        d = integrate(sys_, PhaseState(5.0, 20.0), T, dt).drift
        print(f"{dt:<11.3e} {d:.3e}   {'' if prev is None else f'{prev / d:.2f}'}")
        prev = d


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ell", type=float, default=0.1)
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--T", type=float, default=10.0)
    args = ap.parse_args()
    geom, params = Geometry.bounded(0.0, 10.0), QuantizationParams(ell=args.ell)
    grid_table(geom, params, args.levels)
    drift_table(geom, params, args.levels, args.T)
