"""Randomized property suites shared by the CLI and the acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .duality import (
    ErgodicStrategyData,
    eval_ergodic_commuting,
    eval_ergodic_spatial,
    dual_wavefunction,
    fourier_observation_identity,
    koopman_matrix,
    koopman_wheel_pvm,
    ladder_intertwiner,
    observable_to_transformation,
    pvm_from_wheel,
    wheel_from_pvm,
)
from .games import fourier_transform_2d
from .instances import random_consistent_family, random_spatial_instance, random_wavefunction
from .observables import (
    check_consistency,
    eval_statistical_commuting,
    eval_statistical_spatial,
    lift_observable,
    materialize_pvm,
    observation_apply,
    observation_matrix,
    product_space,
    to_euclidean,
)
from .quantum import Wavefunction, eval_quantum_commuting, eval_quantum_spatial

__all__ = [
    "SuiteReport",
    "pvm_residual",
    "random_ladder",
    "dictionary_suite",
    "duality_suite",
    "inclusion_suite",
    "PROPS_TOL",
]

PROPS_TOL = 1e-10


@dataclass
class SuiteReport:
    name: str
    trials: int
    residuals: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    tol: float = PROPS_TOL

    def record(self, key: str, value: float):
        self.residuals[key] = max(self.residuals.get(key, 0.0), float(value))

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return not self.failures and self.max_residual < self.tol

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "residuals": dict(sorted(self.residuals.items())),
            "failures": list(self.failures),
            "max_residual": self.max_residual,
            "passed": self.passed,
        }


def pvm_residual(projs) -> float:
    """Worst deviation from Hermitian, idempotent, orthogonal and complete."""
    projs = [np.asarray(p) for p in projs]
    d = projs[0].shape[0]
    r = np.abs(sum(projs) - np.eye(d)).max()
    for i, p in enumerate(projs):
        r = max(r, np.abs(p - p.conj().T).max(), np.abs(p @ p - p).max())
        for q in projs[i + 1:]:
            r = max(r, np.abs(p @ q).max())
    return float(r)


def random_ladder(rng: np.random.Generator, resolution: int) -> tuple[int, ...]:
    """Nondecreasing ladder from ``-1`` to ``resolution - 1`` with random repeats."""
    answers = int(rng.integers(1, resolution + 2))
    inner = np.sort(rng.integers(-1, resolution, size=answers - 1))
    return (-1, *map(int, inner), resolution - 1)


def _sizes(rng: np.random.Generator, max_atoms: int = 24, max_res: int = 4):
    n, m = (int(v) for v in rng.integers(1, max_res + 1, size=2))
    blocks = int(rng.integers(1, max_atoms // (n * m) + 1))
    return n, m, blocks


def dictionary_suite(seed: int = 0, trials: int = 200) -> SuiteReport:
    """Items (i) to (v) of the observation calculus on random instances."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("dictionary", trials)
    for _ in range(trials):
        n, m, blocks = _sizes(rng)
        inst = random_consistent_family(rng, n, m, blocks)
        a, b, sp = inst.alphas[0], inst.betas[0], inst.space
        f = random_wavefunction(rng, sp)
        W = np.diag(sp.mu)
        # (i)
        rep.record("i_identity", np.abs(observation_apply(a, n - 1, f) - f).max())
        # (ii)
        j, k = sorted(int(v) for v in rng.integers(0, n + 1, size=2))
        D = observation_matrix(a, k) - observation_matrix(a, j)
        rep.record("ii_idempotent", np.abs(D @ D - D).max())
        rep.record("ii_self_adjoint", np.abs(W @ D - (W @ D).conj().T).max())
        rep.record("ii_positive", max(0.0, -np.vdot(W @ f, D @ f).real))
        # (iii)
        for ladder in (None, random_ladder(rng, n)):
            rep.record("iii_pvm", pvm_residual(materialize_pvm(a, ladder).projections))
        # (iv)
        check_consistency(a, b)
        ka, kb = int(rng.integers(0, n)), int(rng.integers(0, m))
        Oa, Ob = observation_matrix(a, ka), observation_matrix(b, kb)
        rep.record("iv_commute", np.abs(Oa @ Ob - Ob @ Oa).max())
        # (v)
        la, lb = lift_observable(a, b.space, "left"), lift_observable(b, a.space, "right")
        try:
            check_consistency(la, lb)
        except ValueError as err:
            rep.failures.append(f"v: lifted pair inconsistent: {err}")
            continue
        La, Lb = observation_matrix(la, ka), observation_matrix(lb, kb)
        rep.record("v_lift_commute", np.abs(La @ Lb - Lb @ La).max())
    return rep


def duality_suite(seed: int = 0, trials: int = 100) -> SuiteReport:
    """Ergodic table versus Fourier-transformed statistical table, plus wheel and
    local-Fourier identities, on random consistent instances."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("duality", trials)
    for _ in range(trials):
        n, m, blocks = _sizes(rng)
        inst = random_consistent_family(rng, n, m, blocks)
        a, b, f = inst.alphas[0], inst.betas[0], inst.f
        T, S = observable_to_transformation(a), observable_to_transformation(b)
        q = eval_statistical_commuting([a], [b], f).table
        p = eval_ergodic_commuting(ErgodicStrategyData([T], [S], dual_wavefunction(a, b, f))).table
        rep.record("square_commuting", np.abs(p - fourier_transform_2d(q)).max())
        raw = eval_ergodic_commuting(ErgodicStrategyData([T], [S], f))
        try:
            raw.to_strategy(tol=1e-9)
        except ValueError as err:
            rep.failures.append(f"inverse transform of ergodic table is not a strategy: {err}")
        if n <= 2 and m <= 2:
            rep.record("square_same_wavefunction", np.abs(raw.table - fourier_transform_2d(q)).max())
        # wheels
        pvm = materialize_pvm(a)
        wheel = wheel_from_pvm(pvm)
        back = pvm_from_wheel(wheel)
        rep.record("wheel_roundtrip", max(np.abs(x - y).max() for x, y in zip(pvm.projections, back.projections)))
        K = koopman_matrix(T)
        kw = wheel_from_pvm(koopman_wheel_pvm(T))
        rep.record("koopman_wheel", max(np.abs(kw[k] - np.linalg.matrix_power(K, k)).max() for k in range(n)))
        V = ladder_intertwiner(a, -1)
        rep.record(
            "ladder_koopman_equivalence",
            max(np.abs(V @ wheel[k] @ V.conj().T - np.linalg.matrix_power(K, k)).max() for k in range(n)),
        )
        for key, val in fourier_observation_identity(T).items():
            rep.record(f"local_fourier_{key}", val)
        # spatial square
        sp = random_spatial_instance(rng, n, m, int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        al, be = sp.alphas[0], sp.betas[0]
        qs = eval_statistical_spatial([al], [be], sp.f).table
        la, lb = lift_observable(al, be.space, "left"), lift_observable(be, al.space, "right")
        ps = eval_ergodic_spatial(
            [observable_to_transformation(al)], [observable_to_transformation(be)], dual_wavefunction(la, lb, sp.f)
        ).table
        rep.record("square_spatial", np.abs(ps - fourier_transform_2d(qs)).max())
    return rep


def inclusion_suite(seed: int = 0, trials: int = 100) -> SuiteReport:
    """Statistical tables reproduced by quantum evaluators on materialized PVMs."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("inclusion", trials)
    for t in range(trials):
        n, m, blocks = _sizes(rng)
        nx, ny = (int(v) for v in rng.integers(1, 3, size=2))
        inst = random_consistent_family(rng, n, m, blocks, nx, ny)
        psi = Wavefunction(to_euclidean(inst.space, inst.f))
        try:
            q = eval_quantum_commuting(
                [materialize_pvm(a) for a in inst.alphas], [materialize_pvm(b) for b in inst.betas], psi
            )
        except ValueError as err:
            rep.failures.append(f"commuting trial {t}: {err}")
            continue
        s = eval_statistical_commuting(inst.alphas, inst.betas, inst.f)
        rep.record("commuting", np.abs(q.table - s.table).max())

        sp = random_spatial_instance(rng, n, m, int(rng.integers(1, 4)), int(rng.integers(1, 4)), nx, ny)
        lam, pi = sp.alphas[0].space, sp.betas[0].space
        psi = Wavefunction(to_euclidean(product_space(lam, pi), sp.f))
        try:
            qs = eval_quantum_spatial(
                [materialize_pvm(a) for a in sp.alphas], [materialize_pvm(b) for b in sp.betas], psi
            )
        except ValueError as err:
            rep.failures.append(f"spatial trial {t}: {err}")
            continue
        ss = eval_statistical_spatial(sp.alphas, sp.betas, sp.f)
        rep.record("spatial", np.abs(qs.table - ss.table).max())
    return rep
