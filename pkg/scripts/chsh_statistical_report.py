"""Print the statistical CHSH construction: bases, angle integrals, tables and the ergodic dual."""
import numpy as np

from entangle_lab.chsh import build_chsh_statistical, chsh_ergodic_realization, noncommutation_witness

np.set_printoptions(precision=6, suppress=True)


def main():
    r = build_chsh_statistical()
    for who, b in (("alice", r.data.alice), ("bob", r.data.bob)):
        print(f"{who}: kappa={b.kappa:+.6f} lambda={b.lam:+.6f}")
        print(f"  f = {b.f}\n  g = {b.g}")
    for key, rep in r.reports.items():
        worst = max(rep.residuals, key=rep.residuals.get)
        print(f"{key:14s} nu={rep.nu:+.6f} max residual {rep.max_residual:.2e} ({worst})")
    print(f"value {r.value.value:.15f} (target {13 / 16}) classical {r.classical.exact}")
    print(f"max deviation from angular table {r.angular_deviation:.2e}")
    print(f"schmidt coefficients {r.schmidt.schmidt_coefficients}, l1 {r.schmidt.l1_norm:.6f}")
    print(f"generator pairing {r.pairing}")
    print("table p[x, y] (rows a, columns b):")
    for x in range(2):
        for y in range(2):
            print(f"  x={x} y={y}: {r.strategy.table[x, y].tolist()}")
    erg = chsh_ergodic_realization(r)
    print(f"ergodic realization on S3 x S3: residual {erg.residual:.2e}")
    w = noncommutation_witness()
    print(f"noncommutation: beta(alpha f) = {[str(v) for v in w.beta_then_alpha]}, "
          f"alpha(beta f) = {[str(v) for v in w.alpha_then_beta]}")


if __name__ == "__main__":
    main()
