"""Seeded random instances: spaces, observables, consistent families, PVMs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .observables import FiniteSampleSpace, Observable, l2_norm, product_space
from .quantum import ProjectionValuedMeasure

__all__ = [
    "CommutingInstance",
    "SpatialInstance",
    "random_observable",
    "random_wavefunction",
    "random_consistent_family",
    "random_spatial_instance",
    "random_pvm",
    "random_unitary",
]


def random_wavefunction(rng: np.random.Generator, space: FiniteSampleSpace, complex_: bool = True) -> np.ndarray:
    f = rng.normal(size=space.size)
    if complex_:
        f = f + 1j * rng.normal(size=space.size)
    return f / l2_norm(space, f)


def random_observable(rng: np.random.Generator, n: int, classes: int) -> Observable:
    """``classes * n`` atoms; random partition, labels and class weights."""
    N = n * classes
    perm = rng.permutation(N)
    cls = [tuple(int(u) for u in perm[i * n:(i + 1) * n]) for i in range(classes)]
    w = np.empty(N)
    labels = [0] * N
    cw = rng.uniform(0.2, 1.0, size=classes)
    for c, wc in zip(cls, cw):
        w[list(c)] = wc
        for lab, u in zip(rng.permutation(n) + 1, c):
            labels[u] = int(lab)
    space = FiniteSampleSpace(w / w.sum())
    return Observable(space, tuple(cls), tuple(labels))


@dataclass(frozen=True, eq=False)
class CommutingInstance:
    space: FiniteSampleSpace
    alphas: tuple[Observable, ...]
    betas: tuple[Observable, ...]
    f: np.ndarray


def random_consistent_family(
    rng: np.random.Generator, n: int, m: int, blocks: int, nx: int = 1, ny: int = 1, shuffle: bool = True
) -> CommutingInstance:
    """Pairwise consistent ``alpha_x``, ``beta_y`` on ``blocks`` grids of size ``n x m``.

    In each grid ``alpha_x`` classes are columns labelled by a random
    permutation of rows, ``beta_y`` classes are rows labelled by a random
    permutation of columns.  Atoms are then shuffled.
    """
    N = n * m * blocks
    place = rng.permutation(N) if shuffle else np.arange(N)
    atom = lambda b, r, c: int(place[b * n * m + r * m + c])  # noqa: E731
    w = np.empty(N)
    for b, wb in enumerate(rng.uniform(0.2, 1.0, size=blocks)):
        for r in range(n):
            for c in range(m):
                w[atom(b, r, c)] = wb
    space = FiniteSampleSpace(w / w.sum())
    col = tuple(tuple(atom(b, r, c) for r in range(n)) for b in range(blocks) for c in range(m))
    row = tuple(tuple(atom(b, r, c) for c in range(m)) for b in range(blocks) for r in range(n))
    alphas, betas = [], []
    for _ in range(nx):
        lab = [0] * N
        for b in range(blocks):
            sig = rng.permutation(n)
            for r in range(n):
                for c in range(m):
                    lab[atom(b, r, c)] = int(sig[r]) + 1
        alphas.append(Observable(space, col, tuple(lab)))
    for _ in range(ny):
        lab = [0] * N
        for b in range(blocks):
            tau = rng.permutation(m)
            for r in range(n):
                for c in range(m):
                    lab[atom(b, r, c)] = int(tau[c]) + 1
        betas.append(Observable(space, row, tuple(lab)))
    return CommutingInstance(space, tuple(alphas), tuple(betas), random_wavefunction(rng, space))


@dataclass(frozen=True, eq=False)
class SpatialInstance:
    alphas: tuple[Observable, ...]
    betas: tuple[Observable, ...]
    f: np.ndarray  # on the product, atom s*|Pi| + t


def _player_observables(rng: np.random.Generator, n: int, classes: int, k: int) -> list[Observable]:
    """``k`` observables on one space: independent partitions on uniform weights,
    or (half the time) shared weighted classes with fresh labels."""
    if rng.random() < 0.5:
        space = FiniteSampleSpace.uniform(n * classes)
        out = []
        for _ in range(k):
            o = random_observable(rng, n, classes)
            out.append(Observable(space, o.classes, o.labels))
        return out
    base = random_observable(rng, n, classes)
    out = [base]
    for _ in range(k - 1):
        labels = list(base.labels)
        for c in base.classes:
            for lab, u in zip(rng.permutation(n) + 1, c):
                labels[u] = int(lab)
        out.append(Observable(base.space, base.classes, tuple(labels)))
    return out


def random_spatial_instance(
    rng: np.random.Generator, n: int, m: int, classes_a: int, classes_b: int, nx: int = 1, ny: int = 1
) -> SpatialInstance:
    """Observables on ``Lambda`` for Alice and on ``Pi`` for Bob, and a wavefunction on the product."""
    alphas = _player_observables(rng, n, classes_a, nx)
    betas = _player_observables(rng, m, classes_b, ny)
    f = random_wavefunction(rng, product_space(alphas[0].space, betas[0].space))
    return SpatialInstance(tuple(alphas), tuple(betas), f)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pvm(rng: np.random.Generator, d: int, n: int) -> ProjectionValuedMeasure:
    """Split the columns of a random unitary into ``n`` groups (some may be empty)."""
    U = random_unitary(rng, d)
    owner = rng.integers(0, n, size=d)
    return ProjectionValuedMeasure([U[:, owner == j] @ U[:, owner == j].conj().T for j in range(n)])
