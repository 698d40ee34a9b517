"""Tabulate l_k(E) across the gap and mark the zero crossings.

    python scripts/scan_demo.py --nu 0.5 --kmax 3 --points 41
"""
import argparse

import numpy as np

from gapsolve import cli
from gapsolve import dirac_radial as dr
from gapsolve import gap_engine as ge


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--kappa", type=int, default=-1)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--points", type=int, default=41)
    p.add_argument("--e-min", type=float, default=-0.9)
    p.add_argument("--e-max", type=float, default=0.99)
    args = p.parse_args(argv)

    op = dr.assemble(dr.coulomb_spec(args.nu, args.kappa, dr.BasisConfig(7, 30, 60.0, 1.15)))
    grid = np.linspace(args.e_min, args.e_max, args.points)
    rows = cli.emit_scan(op, grid, args.kmax)
    print("E".rjust(10) + "".join(f"l{k}".rjust(14) for k in range(1, args.kmax + 1)))
    prev = None
    for r in rows:
        cells = "".join(("" if x is None else f"{x:.6e}").rjust(14) for x in r[1:])
        mark = ""
        if prev is not None:
            crossed = [k for k in range(1, args.kmax + 1)
                       if prev[k] is not None and r[k] is not None and prev[k] > 0 >= r[k]]
            mark = "  <- " + ", ".join(f"l{k} = 0" for k in crossed) if crossed else ""
        print(f"{r[0]:10.5f}{cells}{mark}")
        prev = r
    for k in range(1, args.kmax + 1):
        lam = ge.minmax_iterate(op, k, gap_edge=1.0).lam
        print(f"lambda_{k} = {lam:.12f}  (Sommerfeld {dr.exact_level(args.nu, args.kappa, k):.12f})")


if __name__ == "__main__":
    main()
