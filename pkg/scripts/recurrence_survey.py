"""Recurrence times of the drift family for random frequency draws.

Usage: python scripts/recurrence_survey.py --draws 5 --K 3 --epsilon 1e-2
"""

import argparse

import numpy as np

from jchcontrol.hilbert import enumerate_basis
from jchcontrol.operators import ModelParams, build
from jchcontrol.spectral import find_recurrence_time

FAMILY = [("H0", []), ("H0+sz_L", ["sigma_z(1)"]), ("H0+sx_L", ["sigma_x(1)"]),
          ("H0+H_H", ["hop_sum"]), ("H0+1", ["identity"])]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=3)
    ap.add_argument("--K", type=int, default=3)
    ap.add_argument("--epsilon", type=float, default=1e-2)
    ap.add_argument("--t-minus", type=float, default=-1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    space = enumerate_basis(2, args.K)
    print(f"{'draw':>4} {'hamiltonian':<10} {'method':<8} {'t_plus':>12} {'error':>9}")
    for draw in range(args.draws):
        params = ModelParams.random(2, rng, [(1, 2)])
        H0 = build("drift", params, space)
        for name, extra in FAMILY:
            H = H0
            for d in extra:
                H = H + build(d, params, space)
            r = find_recurrence_time(H, args.t_minus, args.epsilon)
            t = f"{r.t_plus:.3e}" if r.found else "none"
            print(f"{draw:>4} {name:<10} {r.method:<8} {t:>12} {r.achieved_error:>9.2e}")


if __name__ == "__main__":
    main()
