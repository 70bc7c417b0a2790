"""Block-wise Lie closure dimensions for a range of cavity counts and cutoffs.

Usage: python scripts/closure_sweep.py --M 2 3 --K 4 --seed 0
"""

import argparse
import time

import numpy as np

from jchcontrol.graph import HoppingGraph
from jchcontrol.hilbert import enumerate_basis
from jchcontrol.lie import check_rank_condition
from jchcontrol.operators import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--K", type=int, default=3, help="largest cutoff")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'M':>2} {'K':>2} {'n':>2} {'d_n':>5} {'traceless':>9} {'su(d_n)':>8}  ok")
    for M in args.M:
        edges = HoppingGraph.path(M).sorted_edges()
        params = ModelParams.random(M, rng, edges)
        gens = ["drift"] + [f"sigma_z({i})" for i in range(1, M + 1)] + ["hop_sum", "identity"]
        for K in range(1, args.K + 1):
            t0 = time.perf_counter()
            rep = check_rank_condition(enumerate_basis(M, K), gens, params, tol=args.tol, edges=edges)
            for b in rep.blocks:
                target = b.d ** 2 - 1
                print(f"{M:>2} {K:>2} {b.n:>2} {b.d:>5} {b.traceless_dim:>9} {target:>8}  "
                      f"{'yes' if b.traceless_dim >= target else 'no'}")
            print(f"   (M={M}, K={K}: {time.perf_counter() - t0:.2f} s)")


if __name__ == "__main__":
    main()
