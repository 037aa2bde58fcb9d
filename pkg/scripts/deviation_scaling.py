"""Median sup-deviation of the threshold class versus m, with an A / sqrt(m) fit.

    python3 scripts/deviation_scaling.py --trials 2000 --kmin 6 --kmax 14
"""
import argparse

import numpy as np

from fatconv import Distribution, make_threshold_class, sup_deviation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--kmin", type=int, default=6)
    ap.add_argument("--kmax", type=int, default=14)
    ap.add_argument("--seed", type=int, default=77)
    args = ap.parse_args()

    n = args.grid
    cls = make_threshold_class([i / n for i in range(n)], [i / n for i in range(n + 1)])
    dist = Distribution.uniform(n)
    ms = np.array([2**k for k in range(args.kmin, args.kmax + 1)])
    med = np.array([
        np.median([sup_deviation(cls, dist, int(m), [args.seed, int(m), t]) for t in range(args.trials)])
        for m in ms
    ])
    u = ms**-0.5 / med
    A = u.sum() / (u @ u)
    slope = np.polyfit(np.log(ms), np.log(med), 1)[0]
    print("m,median,fit,rel_residual,median_sqrt_m")
    for m, v in zip(ms, med):
        fit = A / np.sqrt(m)
        print(f"{m},{float(v)!r},{float(fit)!r},{float(abs(fit - v) / v)!r},{float(v * np.sqrt(m))!r}")
    print(f"# A = {A:.6f}, log-log slope = {slope:.4f}")


if __name__ == "__main__":
    main()
