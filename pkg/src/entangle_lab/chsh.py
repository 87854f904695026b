"""The CHSH angular strategy rebuilt from averaging on three equal atoms.

The continuum ``[0, 1)`` is replaced by its three thirds; every function and
operator involved is constant on thirds, so nothing is lost.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .games import BareStrategy, DualCorrelationTable, fourier_transform_2d, GameValue, chsh_game, classical_value_bruteforce, evaluate_game
from .observables import (
    FiniteSampleSpace,
    Observable,
    eval_statistical_spatial,
    from_euclidean,
    inner,
    l2_norm,
    observation_apply,
    observation_matrix,
    product_space,
    to_euclidean,
)
from .quantum import AngularAssignment, EntanglementReport, angular_chsh_strategy, schmidt_report

__all__ = [
    "ConstructionError",
    "three_atom_space",
    "forward_observable",
    "reversed_observable",
    "build_vw",
    "rank_one_generator",
    "solve_fg",
    "ChshStatBasis",
    "make_basis",
    "AngleReport",
    "verify_angle_equations",
    "ChshStatStrategyData",
    "ChshStatResult",
    "build_chsh_statistical",
    "CHSH_LADDER",
    "ChshErgodicResult",
    "reflection_transposition",
    "chsh_ergodic_realization",
    "NoncommutationWitness",
    "noncommutation_witness",
]

CHSH_LADDER = (0, 1, 2)
SQ2 = np.sqrt(2.0)


class ConstructionError(ValueError):
    pass


def three_atom_space() -> FiniteSampleSpace:
    return FiniteSampleSpace.uniform(3)


def forward_observable(space: FiniteSampleSpace | None = None) -> Observable:
    """One class, ``c(atom i) = i + 1``."""
    return Observable.single_class(space or three_atom_space(), (1, 2, 3))


def reversed_observable(space: FiniteSampleSpace | None = None) -> Observable:
    """One class, ``c(atom i) = 3 - i``."""
    return Observable.single_class(space or three_atom_space(), (3, 2, 1))


def _check_three_atoms(space: FiniteSampleSpace):
    if space.size != 3 or max(space.weights) - min(space.weights) > 1e-12:
        raise ConstructionError("expected three atoms of equal weight")


def build_vw(space: FiniteSampleSpace | None = None) -> tuple[np.ndarray, np.ndarray]:
    """The two step functions ``v``, ``w``; ``w`` is sign-fixed so ``<v, w> = +1/2``.

    As displayed, ``v = (1/sqrt2, 1/sqrt2, -sqrt2)`` and
    ``w = (-sqrt2, 1/sqrt2, 1/sqrt2)`` have inner product ``-1/2``.
    """
    space = space or three_atom_space()
    _check_three_atoms(space)
    v = np.array([1 / SQ2, 1 / SQ2, -SQ2])
    w = np.array([-SQ2, 1 / SQ2, 1 / SQ2])
    if inner(space, v, w).real < 0:
        w = -w
    return v, w


def _sign_normalize(u: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    nz = np.flatnonzero(np.abs(u) > tol)
    if nz.size:
        u = u * (np.conj(u[nz[0]]) / abs(u[nz[0]]))
    return u


def rank_one_generator(gamma: Observable, tol: float = 1e-12) -> np.ndarray:
    """Unit ``u`` with ``O_{gamma,1} - O_{gamma,0} = <., u> u``."""
    space = gamma.space
    diff = observation_matrix(gamma, 1) - observation_matrix(gamma, 0)
    evals, evecs = np.linalg.eigh(to_euclidean(space, diff))
    ranks = int(np.sum(evals > 0.5))
    if ranks != 1:
        raise ConstructionError(f"O_1 - O_0 has rank {ranks}, not 1")
    u = from_euclidean(space, evecs[:, np.argmax(evals)]).astype(complex)
    u = _sign_normalize(u / l2_norm(space, u))
    if np.allclose(u.imag, 0, atol=tol):
        u = u.real
    W = space.mu
    rebuilt = np.outer(u, np.conj(u) * W)  # f -> <f, u> u
    if np.abs(rebuilt - diff).max() > 1e-10:
        raise ConstructionError("rank-one reconstruction failed")
    return u


def solve_fg(space, v, w, kappa: float, lam: float, tol: float = 1e-9):
    """Orthonormal ``f, g`` with ``v = cos(k) f + sin(k) g``, ``w = cos(l) f + sin(l) g``."""
    gram = inner(space, v, w).real
    if abs(gram - np.cos(kappa - lam)) > tol:
        raise ConstructionError(f"<v, w> = {gram:.12g} but cos(kappa - lambda) = {np.cos(kappa - lam):.12g}")
    det = np.sin(lam - kappa)
    if abs(det) < 1e-12:
        raise ConstructionError("kappa and lambda coincide modulo pi")
    M = np.array([[np.cos(kappa), np.cos(lam)], [np.sin(kappa), np.sin(lam)]])
    Minv = np.linalg.inv(M)
    V = np.stack([v, w], axis=1)
    F = V @ Minv
    return F[:, 0], F[:, 1]


@dataclass(frozen=True, eq=False)
class ChshStatBasis:
    kappa: float
    lam: float
    space: FiniteSampleSpace
    obs_kappa: Observable
    obs_lambda: Observable
    v: np.ndarray
    w: np.ndarray
    f: np.ndarray
    g: np.ndarray
    sign_flipped: bool = False

    @property
    def v_hat(self) -> np.ndarray:
        return -np.sin(self.kappa) * self.f + np.cos(self.kappa) * self.g

    @property
    def w_hat(self) -> np.ndarray:
        return np.sin(self.lam) * self.f - np.cos(self.lam) * self.g


def make_basis(kappa: float, obs_kappa: Observable | None = None, obs_lambda: Observable | None = None) -> ChshStatBasis:
    """Generators of ``obs_kappa`` / ``obs_lambda`` become ``v`` / ``w``; ``lambda = kappa + pi/3``."""
    space = three_atom_space()
    obs_kappa = obs_kappa or forward_observable(space)
    obs_lambda = obs_lambda or reversed_observable(space)
    _check_three_atoms(obs_kappa.space)
    lam = kappa + np.pi / 3
    v, w = rank_one_generator(obs_kappa), rank_one_generator(obs_lambda)
    flipped = False
    if abs(inner(space, v, w).real - np.cos(kappa - lam)) > 1e-9:
        w, flipped = -w, True
    f, g = solve_fg(space, v, w, kappa, lam)
    return ChshStatBasis(kappa, lam, space, obs_kappa, obs_lambda, v, w, f, g, flipped)


@dataclass(frozen=True)
class AngleReport:
    nu: float
    integrals: dict[str, float]
    targets: dict[str, float]
    residuals: dict[str, float]
    ledger: dict[str, float] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def verify_angle_equations(gamma: Observable, nu: float, f, g, u=None, u_hat=None) -> AngleReport:
    """The six integrals pairing ``O_gamma = O_{gamma,1}`` with ``cos``/``sin`` of ``nu``.

    With ``u`` (the generator of ``gamma``) and ``u_hat`` supplied, also
    returns the inner-product products that each integral is identified with.
    """
    sp = gamma.space
    Of, Og = observation_apply(gamma, 1, f), observation_apply(gamma, 1, g)
    c, s = np.cos(nu), np.sin(nu)
    integrals = {
        "a1": l2_norm(sp, Of) ** 2,
        "a2": l2_norm(sp, g - Og) ** 2,
        "a3": l2_norm(sp, Og) ** 2,
        "a4": l2_norm(sp, f - Of) ** 2,
        "a5": inner(sp, Of, Og).real,
        "a6": -inner(sp, f - Of, g - Og).real,
    }
    targets = {"a1": c * c, "a2": c * c, "a3": s * s, "a4": s * s, "a5": s * c, "a6": s * c}
    residuals = {k: abs(integrals[k] - targets[k]) for k in integrals}
    ledger = {}
    if u is not None and u_hat is not None:
        fu, gu = inner(sp, f, u).real, inner(sp, g, u).real
        fh, gh = inner(sp, f, u_hat).real, inner(sp, g, u_hat).real
        ledger = {
            "<f,u>": fu, "<g,u_hat>": gh, "<g,u>": gu, "-<f,u_hat>": -fh,
            "a1": fu * fu, "a2": gh * gh, "a3": gu * gu, "a4": fh * fh,
            "a5": fu * gu, "a6": gh * (-fh),
        }
    return AngleReport(nu, integrals, targets, residuals, ledger)


@dataclass(frozen=True, eq=False)
class ChshStatStrategyData:
    alice: ChshStatBasis
    bob: ChshStatBasis
    alphas: tuple[Observable, Observable]
    betas: tuple[Observable, Observable]
    delta: np.ndarray  # on the 9-atom product, atom s*3 + t

    @property
    def product(self) -> FiniteSampleSpace:
        return product_space(self.alice.space, self.bob.space)


@dataclass(frozen=True, eq=False)
class ChshStatResult:
    data: ChshStatStrategyData
    strategy: BareStrategy
    value: GameValue
    classical: GameValue
    angular: BareStrategy
    reports: dict[str, AngleReport]
    schmidt: EntanglementReport
    pairing: dict[str, str]

    @property
    def max_angle_residual(self) -> float:
        return max(r.max_residual for r in self.reports.values())

    @property
    def angular_deviation(self) -> float:
        return float(np.abs(self.strategy.table - self.angular.table).max())


def _match_displayed(u: np.ndarray) -> str:
    v, w = build_vw()
    raw_w = np.array([-SQ2, 1 / SQ2, 1 / SQ2])
    for name, cand in (("v", v), ("w", raw_w)):
        for sign, tag in ((1, "+"), (-1, "-")):
            if np.allclose(u, sign * cand, atol=1e-12):
                return f"{tag}{name}"
    return "none"


def build_chsh_statistical() -> ChshStatResult:
    """Statistical spatial strategy reproducing the angular strategy of value 13/16.

    Alice uses angles ``(0, pi/3)``, Bob ``(-pi/6, pi/6)``.  In each pair the
    ``kappa`` angle goes with the forward-labelled observable and the
    ``lambda`` angle with the reversed one.
    """
    alice = make_basis(0.0)
    bob = make_basis(-np.pi / 6)
    angles = AngularAssignment.standard()
    # question -> observable, by matching the question's angle to kappa/lambda
    def pick(basis, angle):
        if np.isclose(angle, basis.kappa):
            return basis.obs_kappa
        if np.isclose(angle, basis.lam):
            return basis.obs_lambda
        raise ConstructionError(f"angle {angle} not in basis")

    alphas = tuple(pick(alice, t) for t in angles.theta)
    betas = tuple(pick(bob, e) for e in angles.eta)
    delta = (np.outer(alice.f, bob.f) + np.outer(alice.g, bob.g)).ravel() / SQ2
    data = ChshStatStrategyData(alice, bob, alphas, betas, delta)

    strategy = eval_statistical_spatial(alphas, betas, delta, CHSH_LADDER, CHSH_LADDER)
    game = chsh_game()

    reports = {}
    for who, b in (("alice", alice), ("bob", bob)):
        reports[f"{who}:kappa"] = verify_angle_equations(b.obs_kappa, b.kappa, b.f, b.g, b.v, b.v_hat)
        reports[f"{who}:lambda"] = verify_angle_equations(b.obs_lambda, b.lam, b.f, b.g, b.w, b.w_hat)

    weights = np.sqrt(np.outer(alice.space.mu, bob.space.mu)).ravel()
    schmidt = schmidt_report(weights * delta, 3, 3)
    pairing = {
        "forward_generator": _match_displayed(rank_one_generator(forward_observable())),
        "reversed_generator": _match_displayed(rank_one_generator(reversed_observable())),
    }
    return ChshStatResult(
        data,
        strategy,
        evaluate_game(game, strategy),
        classical_value_bruteforce(game),
        angular_chsh_strategy(angles),
        reports,
        schmidt,
        pairing,
    )


# --- ergodic realization ---------------------------------------------------


def reflection_transposition(gamma: Observable, tol: float = 1e-12) -> tuple[int, int]:
    """The swap of two atoms whose Koopman operator is ``2 O_{gamma,1} - I`` on mean-zero functions."""
    _check_three_atoms(gamma.space)
    target = 2 * observation_matrix(gamma, 1) - np.eye(3)
    zero_mean = np.array([[1.0, 0.0], [-1.0, 1.0], [0.0, -1.0]])
    for i, j in itertools.combinations(range(3), 2):
        K = np.eye(3)[[{i: j, j: i}.get(s, s) for s in range(3)]]
        if np.abs((K - target) @ zero_mean).max() < tol:
            return i, j
    raise ConstructionError("no transposition realizes the reflection")


@dataclass(frozen=True, eq=False)
class ChshErgodicResult:
    transformations_a: tuple
    transformations_b: tuple
    wavefunction: np.ndarray  # on S3 x S3, atom s*6 + t
    table: DualCorrelationTable
    target: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.abs(self.table.table - self.target).max())


def chsh_ergodic_realization(stat: ChshStatResult | None = None) -> ChshErgodicResult:
    """Ergodic spatial strategy whose table is the Fourier dual of the 13/16 table.

    On three atoms the observables have resolution 3 but only two answers, so
    their orbit transformations are 3-cycles and do not fit.  Instead each
    reflection ``2 O_1 - I`` is a transposition ``tau`` of the atoms, and
    ``tau`` acts on the six permutations of the atoms by left
    multiplication, with orbits of size 2.  The pull-back
    ``(J f)(p) = f(p(0))`` intertwines the two actions.
    """
    from .duality import OrbitTransformation, eval_ergodic_spatial

    stat = stat or build_chsh_statistical()
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    s3 = FiniteSampleSpace.uniform(6)

    def left_mult(gamma: Observable) -> OrbitTransformation:
        i, j = reflection_transposition(gamma)
        tau = {i: j, j: i}
        return OrbitTransformation(s3, tuple(index[tuple(tau.get(v, v) for v in p)] for p in perms))

    J = np.zeros((6, 3))
    J[np.arange(6), [p[0] for p in perms]] = 1.0
    d = stat.data
    Ts = tuple(left_mult(a) for a in d.alphas)
    Ss = tuple(left_mult(b) for b in d.betas)
    delta = (J @ d.delta.reshape(3, 3) @ J.T).ravel()
    table = eval_ergodic_spatial(Ts, Ss, delta)
    return ChshErgodicResult(Ts, Ss, delta, table, fourier_transform_2d(stat.strategy.table))


# --- noncommutation ------------------------------------------------------


@dataclass(frozen=True)
class NoncommutationWitness:
    f: tuple[Fraction, ...]
    beta_then_alpha: tuple[Fraction, ...]  # O_beta[O_alpha[f]]
    alpha_then_beta: tuple[Fraction, ...]  # O_alpha[O_beta[f]]
    atom: int

    @property
    def gap(self) -> Fraction:
        return self.alpha_then_beta[self.atom] - self.beta_then_alpha[self.atom]


def noncommutation_witness() -> NoncommutationWitness:
    """Same classes, reversed labels, ``f = (1, -1, 0)`` on thirds; exact rational arithmetic.

    The atom is the third one, which contains the point 5/6.
    """
    alpha, beta = forward_observable(), reversed_observable()
    f = np.array([Fraction(1), Fraction(-1), Fraction(0)], dtype=object)
    ba = observation_apply(beta, 1, observation_apply(alpha, 1, f))
    ab = observation_apply(alpha, 1, observation_apply(beta, 1, f))
    return NoncommutationWitness(tuple(f), tuple(ba), tuple(ab), 2)
