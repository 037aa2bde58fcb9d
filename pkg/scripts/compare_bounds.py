"""Sweep epsilon and print theorem vs legacy sample sizes as CSV.

Constants default to the unit profile, which is not a rigorous choice; pass
--C-tilde from calibrate_packing.py for a data-driven value.
"""
import argparse

from fatconv import BoundConstants, compare_bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--range", type=float, default=1.0, dest="range_width")
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--kappa", type=int, default=2)
    ap.add_argument("--fat", type=int, default=2)
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--c-tilde", type=float, default=1.0)
    ap.add_argument("--C-tilde", type=float, default=1.0, dest="C_tilde")
    ap.add_argument("--legacy-constant", type=float, default=1.0)
    args = ap.parse_args()

    eps = [2.0**-k for k in range(1, args.kmax + 1)]
    rows = compare_bounds(args.range_width, eps, args.delta, args.kappa, args.fat,
                          BoundConstants(args.c_tilde, args.C_tilde), args.legacy_constant)
    print("epsilon,theorem,legacy,ratio")
    for r in rows:
        print(f"{r['epsilon']!r},{r['theorem']},{r['legacy']},{r['ratio']!r}")


if __name__ == "__main__":
    main()
