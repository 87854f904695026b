"""Why the duality square transports the wavefunction.

With three outcomes and the same f on both sides the ergodic table is not the
Fourier transform of the statistical one; with f' = W f it is.
"""
import numpy as np

from entangle_lab.duality import ErgodicStrategyData, dual_wavefunction, eval_ergodic_commuting, observable_to_transformation
from entangle_lab.games import fourier_transform_2d
from entangle_lab.observables import FiniteSampleSpace, Observable, eval_statistical_commuting

np.set_printoptions(precision=6, suppress=True)


def main():
    sp = FiniteSampleSpace.uniform(3)
    a, b = Observable.single_class(sp, (1, 2, 3)), Observable.trivial(sp)
    f = np.array([np.sqrt(3), 0.0, 0.0])
    T, S = observable_to_transformation(a), observable_to_transformation(b)
    q = eval_statistical_commuting([a], [b], f).table
    target = fourier_transform_2d(q)
    same = eval_ergodic_commuting(ErgodicStrategyData([T], [S], f)).table
    moved = eval_ergodic_commuting(ErgodicStrategyData([T], [S], dual_wavefunction(a, b, f))).table
    print("statistical table q[., 0]:", q[0, 0, :, 0].real)
    print("target  FT(q)[., 0]      :", target[0, 0, :, 0])
    print("ergodic with f           :", same[0, 0, :, 0], f"error {np.abs(same - target).max():.3f}")
    print("ergodic with W f         :", moved[0, 0, :, 0], f"error {np.abs(moved - target).max():.1e}")


if __name__ == "__main__":
    main()
