"""Wheels, orbit transformations, Koopman operators and ergodic strategies.

A transformation is stored as a permutation ``perm`` of atoms with
``perm[u] = T(u)``.  The ambient order on atoms is their index order; each
orbit is listed starting at its least atom and following ``T``, and
``c_T(s)`` is the 0-based position of ``s`` in that listing.

Characters on an orbit are ``chi_j(delta^k) = e_n(j k)``.  They are the
eigenvectors of the Koopman operator with eigenvalue ``e_n(-j)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL
from .games import DualCorrelationTable
from .observables import (
    FiniteSampleSpace,
    Observable,
    check_consistency,
    lift_observable,
    observation_matrix,
    partial_average,
)
from .quantum import OperatorError, ProjectionValuedMeasure

__all__ = [
    "e",
    "OrbitTransformation",
    "Wheel",
    "ErgodicStrategyData",
    "observable_to_transformation",
    "transformation_to_observable",
    "koopman_matrix",
    "local_fourier",
    "inverse_local_fourier",
    "local_fourier_matrix",
    "wheel_from_pvm",
    "pvm_from_wheel",
    "eigenprojections",
    "koopman_wheel_pvm",
    "fourier_observation_identity",
    "ladder_intertwiner",
    "dual_wavefunction",
    "lift_transformation",
    "eval_ergodic_commuting",
    "eval_ergodic_spatial",
]


def e(n: int, x) -> np.ndarray | complex:
    """``e_n(x) = exp(2 pi i x / n)``."""
    return np.exp(2j * np.pi * np.asarray(x) / n)


@dataclass(frozen=True, eq=False)
class OrbitTransformation:
    space: FiniteSampleSpace
    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        N = self.space.size
        if sorted(perm) != list(range(N)):
            raise ValueError("perm is not a bijection of the atoms")
        object.__setattr__(self, "perm", perm)
        seen, orbits = set(), []
        for s in range(N):
            if s in seen:
                continue
            orb, u = [s], perm[s]
            while u != s:
                orb.append(u)
                u = perm[u]
            seen.update(orb)
            orbits.append(tuple(orb))
        sizes = {len(o) for o in orbits}
        if len(sizes) != 1:
            raise ValueError(f"orbit sizes {sorted(sizes)} are not uniform")
        w = self.space.weights
        for o in orbits:
            if max(w[u] for u in o) - min(w[u] for u in o) > DEFAULT_TOL.exact:
                raise ValueError(f"T does not preserve the measure on orbit {o}")
        object.__setattr__(self, "_orbits", tuple(orbits))

    @property
    def orbit_size(self) -> int:
        return len(self._orbits[0])

    @property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        """Each orbit from its least atom, following ``T``."""
        return self._orbits

    def position(self) -> np.ndarray:
        """``c_T`` as an array over atoms."""
        c = np.empty(self.space.size, dtype=int)
        for o in self._orbits:
            c[list(o)] = np.arange(len(o))
        return c

    def power(self, k: int) -> np.ndarray:
        """``T^k`` as an index array (negative ``k`` allowed)."""
        n = self.orbit_size
        k %= n
        out = np.empty(self.space.size, dtype=int)
        for o in self._orbits:
            o = np.array(o)
            out[o] = np.roll(o, -k)
        return out

    def commutes_with(self, other: "OrbitTransformation") -> bool:
        p, q = np.array(self.perm), np.array(other.perm)
        return bool(np.array_equal(p[q], q[p]))

    def __eq__(self, other):
        return isinstance(other, OrbitTransformation) and self.perm == other.perm and self.space == other.space

    def __hash__(self):
        return hash(self.perm)


@dataclass(frozen=True)
class Wheel:
    """Unitary representation ``k -> u(k)`` of ``Z_n``."""

    unitaries: tuple[np.ndarray, ...]

    def __init__(self, unitaries: Sequence, tol: float = DEFAULT_TOL.operator):
        us = tuple(np.array(u, dtype=complex) for u in unitaries)
        n, d = len(us), us[0].shape[0]
        eye = np.eye(d)
        if np.abs(us[0] - eye).max() > tol:
            raise OperatorError("u(0) is not the identity")
        for k, u in enumerate(us):
            if np.abs(u.conj().T @ u - eye).max() > tol:
                raise OperatorError(f"u({k}) is not unitary")
        for j in range(n):
            for k in range(n):
                if np.abs(us[j] @ us[k] - us[(j + k) % n]).max() > tol:
                    raise OperatorError(f"u({j}) u({k}) != u({(j + k) % n})")
        object.__setattr__(self, "unitaries", us)

    def __len__(self):
        return len(self.unitaries)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.unitaries[k % len(self.unitaries)]


# --- observables <-> transformations -------------------------------------


def observable_to_transformation(alpha: Observable) -> OrbitTransformation:
    """Rotate each class one step along its labels (label ``n`` wraps to 1)."""
    order = alpha.ordered
    perm = np.empty(alpha.space.size, dtype=int)
    perm[order] = np.roll(order, -1, axis=1)
    return OrbitTransformation(alpha.space, tuple(perm))


def transformation_to_observable(T: OrbitTransformation) -> Observable:
    return Observable(T.space, T.orbits, tuple(T.position() + 1))


def koopman_matrix(T: OrbitTransformation) -> np.ndarray:
    """``(K f)(s) = f(T^{-1} s)``."""
    N = T.space.size
    K = np.zeros((N, N))
    K[list(T.perm), np.arange(N)] = 1.0
    return K


def local_fourier(T: OrbitTransformation, f) -> np.ndarray:
    """``F_T[f](delta^j s) = (1/n) sum_k e_n(-kj) f(delta^k s)``."""
    f = np.asarray(f, dtype=complex)
    out = np.empty_like(f)
    n = T.orbit_size
    for o in T.orbits:
        o = list(o)
        out[o] = np.fft.fft(f[o]) / n
    return out


def inverse_local_fourier(T: OrbitTransformation, F) -> np.ndarray:
    F = np.asarray(F, dtype=complex)
    out = np.empty_like(F)
    n = T.orbit_size
    for o in T.orbits:
        o = list(o)
        out[o] = np.fft.ifft(F[o]) * n
    return out


def local_fourier_matrix(T: OrbitTransformation) -> np.ndarray:
    N = T.space.size
    eye = np.eye(N)
    return np.stack([local_fourier(T, eye[:, j]) for j in range(N)], axis=1)


# --- wheels <-> PVMs -----------------------------------------------------


def wheel_from_pvm(pvm: ProjectionValuedMeasure) -> Wheel:
    """``u(k) = sum_j e_n(k j) A_j``."""
    n = len(pvm)
    return Wheel([sum(e(n, k * j) * pvm[j] for j in range(n)) for k in range(n)])


def pvm_from_wheel(wheel: Wheel) -> ProjectionValuedMeasure:
    """``A_j = (1/n) sum_k e_n(-k j) u(k)``."""
    n = len(wheel)
    return ProjectionValuedMeasure([sum(e(n, -k * j) * wheel[k] for k in range(n)) / n for j in range(n)])


def _orbit_projector(T: OrbitTransformation, vec_on_orbit: np.ndarray) -> np.ndarray:
    """Projection onto ``{q(s) v(c_T(s)) : q T-invariant}``."""
    N = T.space.size
    P = np.zeros((N, N), dtype=complex)
    v = np.asarray(vec_on_orbit, dtype=complex)
    nv = np.vdot(v, v).real
    if nv < 1e-300:
        return P
    for o in T.orbits:
        o = list(o)
        P[np.ix_(o, o)] = np.outer(v, v.conj()) / nv
    return P


def eigenprojections(T: OrbitTransformation) -> ProjectionValuedMeasure:
    """``A_j``: projection onto the ``e_n(-j)`` eigenspace of the Koopman operator,
    i.e. onto functions ``q(s) e_n(j c_T(s))`` with ``q`` invariant."""
    n = T.orbit_size
    k = np.arange(n)
    return ProjectionValuedMeasure([_orbit_projector(T, e(n, j * k)) for j in range(n)])


def koopman_wheel_pvm(T: OrbitTransformation) -> ProjectionValuedMeasure:
    """The PVM whose wheel is ``k -> K_T^k``: answer ``j`` is ``A_{-j}``."""
    A = eigenprojections(T)
    n = len(A)
    return ProjectionValuedMeasure([A[(-j) % n] for j in range(n)])


def fourier_observation_identity(T: OrbitTransformation) -> dict[str, float]:
    """Residuals of the local-Fourier identities for ``T``.

    * ``sum_j A_j = I`` and ``sum_j e_n(-j) A_j = K_T``;
    * for ``k = -1 .. n-2``: ``F_T (A_*^(k) + A_0 + ... + A_k) F_T^-1 = O_{alpha,k+1}``
      where ``A_*^(k)`` projects onto ``chi_{k+1} + ... + chi_{n-1}`` on each
      orbit and ``alpha`` is the observable of ``T``.
    """
    n = T.orbit_size
    A = eigenprojections(T)
    K = koopman_matrix(T)
    N = T.space.size
    out = {
        "partition_of_unity": float(np.abs(sum(A.projections) - np.eye(N)).max()),
        "koopman_inversion": float(np.abs(sum(e(n, -j) * A[j] for j in range(n)) - K).max()),
    }
    F = local_fourier_matrix(T)
    Finv = np.linalg.inv(F)
    alpha = transformation_to_observable(T)
    pos = np.arange(n)
    worst = 0.0
    for k in range(-1, n - 1):
        tail = sum((e(n, j * pos) for j in range(k + 1, n)), np.zeros(n, dtype=complex))
        R = _orbit_projector(T, tail) + sum((A[j] for j in range(k + 1)), np.zeros((N, N)))
        worst = max(worst, float(np.abs(F @ R @ Finv - observation_matrix(alpha, k + 1)).max()))
    out["fourier_observation"] = worst
    return out


# --- ladder/character intertwiners ---------------------------------------


def _ladder_vectors(n: int) -> np.ndarray:
    """Columns: unit generators of ``I_k (+) A_{n-k} - I_{k-1} (+) A_{n-k+1}``, ``k = 0..n-1``."""
    eye = np.eye(n)
    O = [np.zeros((n, n))] + [
        np.stack([partial_average(k, n, eye[:, j]) for j in range(n)], axis=1) for k in range(n)
    ]
    cols = []
    for k in range(n):
        w, V = np.linalg.eigh(O[k + 1] - O[k])
        cols.append(V[:, np.argmax(w)])
    return np.stack(cols, axis=1)


def _class_unitary(n: int, sign: int) -> np.ndarray:
    """``n x n`` unitary taking ladder generator ``k`` to ``chi_{sign*k} / sqrt(n)``."""
    L = _ladder_vectors(n)
    a = np.arange(n)
    C = np.stack([e(n, ((sign * k) % n) * a) / np.sqrt(n) for k in range(n)], axis=1)
    return C @ L.conj().T


def ladder_intertwiner(alpha: Observable, sign: int = 1) -> np.ndarray:
    """Unitary ``W`` on ``L^2`` with ``W (O_k - O_{k-1}) W^* = A_{sign*k}`` for the
    transformation of ``alpha``; acts inside each class in label order."""
    n = alpha.resolution
    V = _class_unitary(n, sign)
    N = alpha.space.size
    W = np.zeros((N, N), dtype=complex)
    for row in alpha.ordered:
        W[np.ix_(row, row)] = V
    return W


def dual_wavefunction(alpha: Observable, beta: Observable, f) -> np.ndarray:
    """Carry ``f`` to the wavefunction whose ergodic table is the Fourier
    transform of the statistical table of ``(alpha, beta, f)``.

    Alice's ladder answer ``k`` goes to the eigenprojection ``A_k`` and Bob's
    answer ``j`` to ``B_{-j}``; the two class unitaries commute because
    ``alpha`` and ``beta`` are consistent.
    """
    check_consistency(alpha, beta)
    Wa = ladder_intertwiner(alpha, +1)
    Wb = ladder_intertwiner(beta, -1)
    return Wb @ (Wa @ np.asarray(f, dtype=complex))


# --- ergodic strategies --------------------------------------------------


@dataclass(frozen=True, eq=False)
class ErgodicStrategyData:
    transformations_a: tuple[OrbitTransformation, ...]
    transformations_b: tuple[OrbitTransformation, ...]
    f: np.ndarray
    commuting: bool = True

    def __post_init__(self):
        object.__setattr__(self, "transformations_a", tuple(self.transformations_a))
        object.__setattr__(self, "transformations_b", tuple(self.transformations_b))
        object.__setattr__(self, "f", np.asarray(self.f, dtype=complex))


def lift_transformation(T: OrbitTransformation, other: FiniteSampleSpace, side: str = "left") -> OrbitTransformation:
    from .observables import product_space

    if side == "left":
        sp = product_space(T.space, other)
        P = other.size
        perm = [T.perm[s] * P + t for s in range(T.space.size) for t in range(P)]
    else:
        sp = product_space(other, T.space)
        P = T.space.size
        perm = [s * P + T.perm[t] for s in range(other.size) for t in range(P)]
    return OrbitTransformation(sp, tuple(perm))


def eval_ergodic_commuting(data: ErgodicStrategyData, tol=DEFAULT_TOL) -> DualCorrelationTable:
    """``p[x,y,k,j] = (1/nm) int f(T_x^{-k} u) conj(f(S_y^{-j} u)) dmu``."""
    Ts, Ss, f = data.transformations_a, data.transformations_b, data.f
    space = Ts[0].space
    if any(T.space != space for T in (*Ts, *Ss)):
        raise ValueError("transformations live on different spaces")
    for x, T in enumerate(Ts):
        for y, S in enumerate(Ss):
            if not T.commutes_with(S):
                raise ValueError(f"T_{x} and S_{y} do not commute")
    mu = space.mu
    if abs(np.sum(mu * np.abs(f) ** 2) - 1) > tol.operator:
        raise ValueError("wavefunction is not normalized")
    n, m = Ts[0].orbit_size, Ss[0].orbit_size
    fa = np.array([[f[T.power(-k)] for k in range(n)] for T in Ts])  # x, k, u
    fb = np.array([[f[S.power(-j)] for j in range(m)] for S in Ss])
    cells = np.einsum("u,xku,yju->xykj", mu, fa, fb.conj()) / (n * m)
    return DualCorrelationTable(cells)


def eval_ergodic_spatial(
    Ts: Sequence[OrbitTransformation], Ss: Sequence[OrbitTransformation], f, tol=DEFAULT_TOL
) -> DualCorrelationTable:
    """``p[x,y,k,j] = (1/nm) int f(T^{-k} s, t) conj(f(s, S^{-j} t))``; atom ``(s,t) = s*|Pi|+t``."""
    lam, pi = Ts[0].space, Ss[0].space
    if any(T.space != lam for T in Ts) or any(S.space != pi for S in Ss):
        raise ValueError("transformations of one player live on different spaces")
    F = np.asarray(f, dtype=complex)
    if F.shape != (lam.size * pi.size,):
        raise ValueError("wavefunction does not live on the product space")
    F = F.reshape(lam.size, pi.size)
    w = np.outer(lam.mu, pi.mu)
    if abs(np.sum(w * np.abs(F) ** 2) - 1) > tol.operator:
        raise ValueError("wavefunction is not normalized")
    n, m = Ts[0].orbit_size, Ss[0].orbit_size
    fa = np.array([[F[T.power(-k), :] for k in range(n)] for T in Ts])  # x,k,s,t
    fb = np.array([[F[:, S.power(-j)] for j in range(m)] for S in Ss])
    cells = np.einsum("st,xkst,yjst->xykj", w, fa, fb.conj()) / (n * m)
    return DualCorrelationTable(cells)


def transformations_of(observables: Sequence[Observable]) -> tuple[OrbitTransformation, ...]:
    return tuple(observable_to_transformation(o) for o in observables)


def lifted_pair(alpha: Observable, beta: Observable):
    """``alpha`` on Lambda and ``beta`` on Pi, lifted to the product."""
    return lift_observable(alpha, beta.space, "left"), lift_observable(beta, alpha.space, "right")
