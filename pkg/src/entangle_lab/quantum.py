"""Finite-dimensional PVMs, tensor products and quantum strategy evaluators.

Inner products are linear in the first slot: ``<u, v> = sum u_i conj(v_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL
from .games import BareStrategy, GameValue, chsh_game, evaluate_game

__all__ = [
    "OperatorError",
    "ProjectionValuedMeasure",
    "Wavefunction",
    "AngularAssignment",
    "EntanglementReport",
    "tensor",
    "eval_quantum_commuting",
    "eval_quantum_spatial",
    "q_projection",
    "q_hat_projection",
    "chsh_delta",
    "angular_pvms",
    "angular_chsh_strategy",
    "chsh_value_closed_form",
    "schmidt_report",
    "CHSH_ANGLES",
]


class OperatorError(ValueError):
    pass


def _op(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise OperatorError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise OperatorError("operator has non-finite entries")
    return a


@dataclass(frozen=True)
class ProjectionValuedMeasure:
    projections: tuple[np.ndarray, ...]

    def __init__(self, projections: Sequence, tol: float = DEFAULT_TOL.operator):
        ops = tuple(_op(p) for p in projections)
        if not ops:
            raise OperatorError("a PVM needs at least one projection")
        d = ops[0].shape[0]
        if any(p.shape != (d, d) for p in ops):
            raise OperatorError("projections have different dimensions")
        for j, p in enumerate(ops):
            if np.abs(p - p.conj().T).max() > tol:
                raise OperatorError(f"projection {j} is not Hermitian")
            if np.abs(p @ p - p).max() > tol:
                raise OperatorError(f"projection {j} is not idempotent")
        for j in range(len(ops)):
            for k in range(j + 1, len(ops)):
                if np.abs(ops[j] @ ops[k]).max() > tol:
                    raise OperatorError(f"projections {j} and {k} are not orthogonal")
        if np.abs(sum(ops) - np.eye(d)).max() > tol:
            raise OperatorError("projections do not sum to the identity")
        for p in ops:
            p.setflags(write=False)
        object.__setattr__(self, "projections", ops)

    @property
    def dim(self) -> int:
        return self.projections[0].shape[0]

    def __len__(self) -> int:
        return len(self.projections)

    def __getitem__(self, a: int) -> np.ndarray:
        return self.projections[a]


@dataclass(frozen=True)
class Wavefunction:
    amplitudes: np.ndarray

    def __init__(self, amplitudes, tol: float = DEFAULT_TOL.operator):
        v = np.array(amplitudes, dtype=complex).ravel()
        if abs(np.linalg.norm(v) - 1) > tol:
            raise OperatorError(f"wavefunction has norm {np.linalg.norm(v)!r}")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


def tensor(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def _table_from(cells: np.ndarray, tol: float) -> BareStrategy:
    if np.abs(cells.imag).max(initial=0.0) > tol:
        raise OperatorError("correlation table has a non-negligible imaginary part")
    return BareStrategy(cells.real, tol=tol)


def eval_quantum_commuting(
    pvms_a: Sequence[ProjectionValuedMeasure],
    pvms_b: Sequence[ProjectionValuedMeasure],
    psi: Wavefunction,
    tol=DEFAULT_TOL,
) -> BareStrategy:
    """``p[x, y, a, b] = <A^x_a psi, B^y_b psi>`` for commuting PVMs on one space."""
    d = psi.dim
    if any(p.dim != d for p in (*pvms_a, *pvms_b)):
        raise OperatorError("PVM dimension does not match the wavefunction")
    for x, A in enumerate(pvms_a):
        for y, B in enumerate(pvms_b):
            for a, Pa in enumerate(A.projections):
                for b, Pb in enumerate(B.projections):
                    c = np.linalg.norm(Pa @ Pb - Pb @ Pa, 2)
                    if c > tol.commutator:
                        raise OperatorError(
                            f"A^{x}_{a} and B^{y}_{b} do not commute (norm {c:.3e})"
                        )
    v = psi.amplitudes
    n, m = len(pvms_a[0]), len(pvms_b[0])
    cells = np.zeros((len(pvms_a), len(pvms_b), n, m), dtype=complex)
    for x, A in enumerate(pvms_a):
        av = [P @ v for P in A.projections]
        for y, B in enumerate(pvms_b):
            bv = [P @ v for P in B.projections]
            for a in range(n):
                for b in range(m):
                    cells[x, y, a, b] = np.vdot(bv[b], av[a])
    return _table_from(cells, tol.structural)


def eval_quantum_spatial(
    pvms_a: Sequence[ProjectionValuedMeasure],
    pvms_b: Sequence[ProjectionValuedMeasure],
    psi: Wavefunction,
    tol=DEFAULT_TOL,
) -> BareStrategy:
    """``p[x, y, a, b] = <(A_x^a (x) B_y^b) psi, psi>`` on ``H (x) K``."""
    dh, dk = pvms_a[0].dim, pvms_b[0].dim
    if any(p.dim != dh for p in pvms_a) or any(p.dim != dk for p in pvms_b):
        raise OperatorError("PVMs of one player act on different spaces")
    if psi.dim != dh * dk:
        raise OperatorError(f"wavefunction dimension {psi.dim} != {dh}*{dk}")
    # psi as a dh x dk coefficient matrix; (A (x) B) psi  <->  A C B^T
    C = psi.amplitudes.reshape(dh, dk)
    n, m = len(pvms_a[0]), len(pvms_b[0])
    cells = np.zeros((len(pvms_a), len(pvms_b), n, m), dtype=complex)
    for x, A in enumerate(pvms_a):
        for y, B in enumerate(pvms_b):
            for a in range(n):
                for b in range(m):
                    cells[x, y, a, b] = np.vdot(C, A[a] @ C @ B[b].T)
    return _table_from(cells, tol.structural)


# --- angular CHSH --------------------------------------------------------

CHSH_ANGLES = {"theta": (0.0, np.pi / 3), "eta": (np.pi / 6, -np.pi / 6)}


@dataclass(frozen=True)
class AngularAssignment:
    theta: tuple[float, float]
    eta: tuple[float, float]

    def __post_init__(self):
        if not np.all(np.isfinite([*self.theta, *self.eta])):
            raise ValueError("angles must be finite")

    @classmethod
    def standard(cls) -> "AngularAssignment":
        return cls(CHSH_ANGLES["theta"], CHSH_ANGLES["eta"])


def q_projection(theta: float) -> np.ndarray:
    u = np.array([np.cos(theta), np.sin(theta)])
    return np.outer(u, u).astype(complex)


def q_hat_projection(theta: float) -> np.ndarray:
    u = np.array([np.sin(theta), -np.cos(theta)])
    return np.outer(u, u).astype(complex)


def chsh_delta() -> Wavefunction:
    i, j = np.eye(2)
    return Wavefunction((np.kron(i, i) + np.kron(j, j)) / np.sqrt(2))


def angular_pvms(angles: Sequence[float]) -> list[ProjectionValuedMeasure]:
    """Answer 0 is ``q_angle``, answer 1 is ``q_hat_angle``."""
    return [ProjectionValuedMeasure([q_projection(t), q_hat_projection(t)]) for t in angles]


def angular_chsh_strategy(angles: AngularAssignment) -> BareStrategy:
    return eval_quantum_spatial(angular_pvms(angles.theta), angular_pvms(angles.eta), chsh_delta())


def chsh_value_closed_form(angles: AngularAssignment) -> GameValue:
    (t0, t1), (e0, e1) = angles.theta, angles.eta
    c2, s2 = lambda z: np.cos(z) ** 2, lambda z: np.sin(z) ** 2
    return GameValue(float((c2(e0 - t0) + c2(e0 - t1) + c2(t0 - e1) + s2(t1 - e1)) / 4))


def angular_chsh_value(angles: AngularAssignment) -> GameValue:
    return evaluate_game(chsh_game(), angular_chsh_strategy(angles))


# --- entanglement --------------------------------------------------------


@dataclass(frozen=True)
class EntanglementReport:
    schmidt_coefficients: tuple[float, ...]
    l1_norm: float
    l2_norm: float
    classical: bool


def schmidt_report(psi, dh: int, dk: int, cutoff: float = 1e-12) -> EntanglementReport:
    """Singular values of the ``dh x dk`` coefficient matrix of ``psi``."""
    v = psi.amplitudes if isinstance(psi, Wavefunction) else np.asarray(psi, dtype=complex)
    if v.size != dh * dk:
        raise OperatorError(f"cannot reshape a vector of size {v.size} to {dh}x{dk}")
    sv = np.linalg.svd(v.reshape(dh, dk), compute_uv=False)
    sv = sv[sv > cutoff]
    l1, l2 = float(sv.sum()), float(np.sqrt((sv**2).sum()))
    return EntanglementReport(tuple(float(s) for s in sv), l1, l2, l1 <= 1 + 1e-9)
