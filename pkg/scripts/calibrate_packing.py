"""Calibrate the exponent constant of the packing bound on random restrictions.

Reports how many instances break the unit profile and the smallest C_tilde that
covers all of them (with c_tilde fixed). For multi-level classes c_tilde must be
at most 1/2: above that, fat = 0 no longer forces the restriction into one ball.
"""
import argparse

import numpy as np

from fatconv import (
    InvalidArgument,
    UNIT_PROFILE, SampleVector, calibrate_C_tilde, fat_dim, packing_number_exact,
    random_class, restrict, rv_packing_bound,
)


def instances(n, seed, c_tilde):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        cls = random_class(rng, int(rng.integers(1, 7)), int(rng.integers(1, 25)),
                           int(rng.choice([2, 3, 5])))
        m = int(rng.integers(1, 5))
        r = restrict(cls, SampleVector.of(rng.integers(0, cls.n_points, 2 * m).tolist()))
        zeta = float(rng.choice([0.1, 0.2, 0.3, 0.45]))
        yield packing_number_exact(r.vectors, zeta), 1.0, zeta, fat_dim(cls, c_tilde * zeta)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--c-tilde", type=float, default=0.5)
    args = ap.parse_args()

    inst = list(instances(args.instances, args.seed, args.c_tilde))
    broken = sum(p > rv_packing_bound(r, z, f, UNIT_PROFILE) for p, r, z, f in inst)
    print(f"instances: {len(inst)}")
    print(f"unit-profile violations: {broken}")
    try:
        C = calibrate_C_tilde(inst, c_tilde=args.c_tilde)
    except InvalidArgument:
        stuck = sum(f == 0 and p > 1 for p, _, _, f in inst)
        print(f"no exponent constant works at c_tilde={args.c_tilde}: "
              f"{stuck} instances have fat 0 but packing > 1")
        return
    print(f"calibrated C_tilde (c_tilde={args.c_tilde}): {C:.6f}")


if __name__ == "__main__":
    main()
