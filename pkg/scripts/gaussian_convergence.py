"""Monte-Carlo error of the Gaussian CHSH realization as the sample count grows."""
import argparse

import numpy as np

from entangle_lab.gaussian import (
    DEFAULT_SEED,
    GaussianSampler,
    build_kernel,
    chsh_gaussian_setup,
    exact_unitary_spatial_table,
    mc_kernel,
    realize_spatial_strategy_mc,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    ap.add_argument("--max-exp", type=int, default=6)
    args = ap.parse_args()
    s = chsh_gaussian_setup()
    ka = build_kernel(s.rep_a, s.rho, s.words, s.rep_a.orders)
    exact = exact_unitary_spatial_table(s.rep_a, s.rep_b, s.psi, 2, 2, 2, 2).table
    print(f"{'N':>9} {'kernel err':>11} {'max SE':>9} {'table err':>10} {'table SE':>9}")
    for e in range(3, args.max_exp + 1):
        N = 10**e
        est, se = mc_kernel(GaussianSampler(ka, args.seed, 2), N)
        tab, tse = realize_spatial_strategy_mc(
            s.chi, s.rep_a, s.rep_b, s.rho, s.vartheta, s.words, s.words, 2, 2, 2, 2, N, args.seed
        )
        print(f"{N:>9} {np.abs(est - ka.matrix).max():11.2e} {se.max():9.2e} "
              f"{np.abs(tab.table - exact).max():10.2e} {tse.max():9.2e}")


if __name__ == "__main__":
    main()
