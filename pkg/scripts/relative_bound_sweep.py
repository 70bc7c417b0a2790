"""Ratio of the interaction norm to its analytic bound over random draws.

Usage: python scripts/relative_bound_sweep.py --draws 20 --K 10
"""

import argparse

import numpy as np

from jchcontrol.hilbert import enumerate_basis
from jchcontrol.operators import ModelParams
from jchcontrol.spectral import relative_bound_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=20)
    ap.add_argument("--M", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--K", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'M':>2} {'K':>3} {'max ratio':>12} {'min margin':>12}  all passed")
    for M in args.M:
        for K in range(1, args.K + 1):
            space = enumerate_basis(M, K)
            results = [relative_bound_check(space, ModelParams.random(M, rng))
                       for _ in range(args.draws)]
            ratio = max(r.sigma_max / r.bound for r in results)
            margin = min(r.margin for r in results)
            print(f"{M:>2} {K:>3} {ratio:>12.9f} {margin:>12.3e}  {all(r.passed for r in results)}")


if __name__ == "__main__":
    main()
