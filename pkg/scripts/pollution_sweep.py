"""Naive gap eigenvalues versus min-max levels for a few Coulomb channels.

Prints, per basis size, the naive eigenvalues in the gap, how many of them
are not min-max levels, and how many match no Sommerfeld energy. The s1/2
channel (kappa=-1) is the bench default; kappa=+1 is where the unbalanced
basis produces a spurious low state.
"""
import argparse
import json

from gapsolve import dirac_radial as dr
from gapsolve import pollution_bench as pb


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--kappas", type=int, nargs="+", default=[-1, 1, -2])
    p.add_argument("--sizes", type=int, nargs="+", default=[15, 25, 40])
    p.add_argument("--gap", type=float, nargs=2, default=[-0.95, 0.999])
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--json", action="store_true", help="dump full reports instead of the summary")
    args = p.parse_args(argv)

    for kappa in args.kappas:
        spec = dr.coulomb_spec(args.nu, kappa, dr.BasisConfig(7, args.sizes[0], 60.0, 1.15))
        rep = pb.pollution_report(spec, args.sizes, tuple(args.gap), args.k_max)
        if args.json:
            print(json.dumps({"kappa": kappa, **rep.to_dict()}))
            continue
        print(f"kappa={kappa:+d}  exact lambda_1={dr.exact_level(args.nu, kappa, 1):.10f}")
        for r in rep.per_size:
            naive = ", ".join(f"{x:.6f}" for x in r.naive[:6])
            print(f"  n={r.size:3d}  lambda0={r.lambda0:.6f}  minmax l1={r.minmax[0]:.10f}  "
                  f"spurious={len(r.spurious)}  off-oracle={len(r.oracle_unmatched)}  naive=[{naive}{', ...' if len(r.naive) > 6 else ''}]")
        print(f"  lambda_1 drift: {['%.2e' % d[0] for d in rep.drift]}")


if __name__ == "__main__":
    main()
