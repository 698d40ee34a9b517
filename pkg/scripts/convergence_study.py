"""Dirac-Coulomb levels against the Sommerfeld formula under basis refinement.

    python scripts/convergence_study.py --nu 0.5 --kappa -1 --levels 1 2 3
"""
import argparse
import csv
import sys

from gapsolve import dirac_radial as dr


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--kappa", type=int, default=-1)
    p.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 30, 40, 60, 80])
    p.add_argument("--order", type=int, default=7)
    p.add_argument("--rmax", type=float, default=None, help="default: scaled to the highest level's decay length")
    p.add_argument("--grading", type=float, default=1.15)
    p.add_argument("--splitting", default="talman", choices=["talman", "free_projector"])
    args = p.parse_args(argv)

    rmax = args.rmax or dr.default_rmax(dr.exact_level(args.nu, args.kappa, max(args.levels)))
    spec = dr.coulomb_spec(args.nu, args.kappa, dr.BasisConfig(args.order, args.sizes[0], rmax, args.grading),
                           args.splitting)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["k", "n_intervals", "lambda", "exact", "error", "iterations", "status"])
    for k in args.levels:
        for row in dr.convergence_study(spec, k, args.sizes):
            err = "" if row["error"] is None else f"{row['error']:.3e}"
            out.writerow([k, row["size"], f"{row['lambda']:.15f}", row["exact"], err, row["iterations"], row["status"]])


if __name__ == "__main__":
    main()
