"""Gaussian realization of unitary strategies over free products of cyclic groups.

Everything here is real.  Words index the coordinates of a centered Gaussian
vector whose covariance is the Gram matrix ``p(g, h) = <U_g psi, U_h psi>``;
only finite marginals over a chosen word set ``F`` are ever sampled.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .games import DualCorrelationTable

__all__ = [
    "DEFAULT_SEED",
    "KernelError",
    "GroupWord",
    "word_multiply",
    "word_inverse",
    "enumerate_words",
    "letter",
    "WordRepresentation",
    "CovarianceKernel",
    "GaussianSampler",
    "build_kernel",
    "pseudo_sqrt",
    "sample",
    "mc_correlation",
    "mc_kernel",
    "mc_fourth_moment",
    "solve_chi",
    "exact_unitary_spatial_table",
    "realize_spatial_strategy_mc",
    "realify_operator",
    "realify_vector",
    "chsh_representations",
    "ChshGaussianSetup",
    "chsh_gaussian_setup",
]

DEFAULT_SEED = 0xC0FFEE
MAX_WORD_LENGTH = 6


class KernelError(ValueError):
    pass


# --- words ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class GroupWord:
    """Reduced word: letters ``(factor, exponent)`` with nonzero exponents and
    no two adjacent letters from the same factor."""

    letters: tuple[tuple[int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __str__(self) -> str:
        return "e" if not self.letters else "".join(f"({x},{k})" for x, k in self.letters)


def _reduce(letters, orders: Sequence[int]) -> GroupWord:
    stack: list[list[int]] = []
    for x, k in letters:
        k %= orders[x]
        if k == 0:
            continue
        if stack and stack[-1][0] == x:
            stack[-1][1] = (stack[-1][1] + k) % orders[x]
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([x, k])
    return GroupWord(tuple((x, k) for x, k in stack))


def letter(x: int, k: int, orders: Sequence[int]) -> GroupWord:
    """The one-symbol word ``(x, k)`` (identity when ``k = 0 mod n_x``)."""
    return _reduce([(x, k)], orders)


def word_multiply(a: GroupWord, b: GroupWord, orders: Sequence[int]) -> GroupWord:
    return _reduce(a.letters + b.letters, orders)


def word_inverse(a: GroupWord, orders: Sequence[int]) -> GroupWord:
    return _reduce([(x, -k) for x, k in reversed(a.letters)], orders)


def enumerate_words(orders: Sequence[int], max_length: int, cap: int = 100_000) -> list[GroupWord]:
    """All reduced words of length at most ``max_length``, identity first, then by length."""
    if max_length < 0 or max_length > MAX_WORD_LENGTH:
        raise ValueError(f"max_length must lie in 0..{MAX_WORD_LENGTH}")
    words, layer = [GroupWord()], [GroupWord()]
    for _ in range(max_length):
        nxt = []
        for w in layer:
            last = w.letters[-1][0] if w.letters else None
            for x, n in enumerate(orders):
                if x == last:
                    continue
                nxt.extend(GroupWord(w.letters + ((x, k),)) for k in range(1, n))
        words.extend(nxt)
        if len(words) > cap:
            raise ValueError(f"word enumeration exceeds cap {cap}")
        layer = nxt
    return words


@dataclass(frozen=True, eq=False)
class WordRepresentation:
    """Representation of a free product fixed by one generator per factor."""

    generators: tuple[np.ndarray, ...]
    orders: tuple[int, ...]
    tol: float = 1e-9

    def __post_init__(self):
        gens = tuple(np.array(g, dtype=float) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        d = gens[0].shape[0]
        for x, (U, n) in enumerate(zip(gens, self.orders)):
            if U.shape != (d, d):
                raise KernelError(f"generator {x} has shape {U.shape}")
            if np.abs(U.T @ U - np.eye(d)).max() > self.tol:
                raise KernelError(f"generator {x} is not orthogonal")
            if np.abs(np.linalg.matrix_power(U, n) - np.eye(d)).max() > self.tol:
                raise KernelError(f"generator {x} does not have order dividing {n}")

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    def __call__(self, word: GroupWord) -> np.ndarray:
        out = np.eye(self.dim)
        for x, k in word.letters:
            out = out @ np.linalg.matrix_power(self.generators[x], k)
        return out


def realify_operator(a) -> np.ndarray:
    """``C^d -> R^{2d}``: ``[[Re, -Im], [Im, Re]]``."""
    a = np.asarray(a, dtype=complex)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def realify_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.concatenate([v.real, v.imag])


# --- kernels and sampling ------------------------------------------------


@dataclass(frozen=True, eq=False)
class CovarianceKernel:
    words: tuple[GroupWord, ...]
    matrix: np.ndarray

    def __post_init__(self):
        K = np.array(self.matrix, dtype=float)
        if K.shape != (len(self.words), len(self.words)):
            raise KernelError("kernel shape does not match the word set")
        if np.abs(K - K.T).max(initial=0.0) > 1e-12:
            raise KernelError("kernel is not symmetric")
        lo = np.linalg.eigvalsh(K).min()
        if lo < -1e-9:
            raise KernelError(f"kernel is not PSD (min eigenvalue {lo:.3e})")
        K.setflags(write=False)
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "matrix", K)

    def index(self, word: GroupWord) -> int:
        return self.words.index(word)


def build_kernel(
    rep: Callable[[GroupWord], np.ndarray],
    psi,
    words: Sequence[GroupWord],
    orders: Sequence[int] | None = None,
    tol: float = 1e-9,
    max_pairs: int = 400,
) -> CovarianceKernel:
    """Gram matrix ``[<U_g psi, U_h psi>]`` over ``words``.

    With ``orders`` given, multiplicativity ``U_{gh} = U_g U_h`` is checked on
    word pairs (all pairs, or a fixed sample of ``max_pairs``).
    """
    psi = np.asarray(psi)
    if np.iscomplexobj(psi):
        if np.abs(psi.imag).max() > tol:
            raise KernelError("wavefunction is complex; realify it first")
        psi = psi.real
    ops = [np.asarray(rep(w)) for w in words]
    if any(np.iscomplexobj(U) and np.abs(U.imag).max() > tol for U in ops):
        raise KernelError("representation has complex entries; realify it first")
    ops = [np.real(U) for U in ops]
    if orders is not None:
        pairs = list(itertools.product(range(len(words)), repeat=2))
        if len(pairs) > max_pairs:
            pick = np.random.default_rng(0).choice(len(pairs), max_pairs, replace=False)
            pairs = [pairs[i] for i in pick]
        for i, j in pairs:
            lhs = np.real(rep(word_multiply(words[i], words[j], orders)))
            if np.abs(lhs - ops[i] @ ops[j]).max() > tol:
                raise KernelError(f"representation is not multiplicative on {words[i]}, {words[j]}")
    vecs = np.stack([U @ psi for U in ops])
    K = vecs @ vecs.T
    return CovarianceKernel(tuple(words), (K + K.T) / 2)


def pseudo_sqrt(K, cutoff: float = 1e-10) -> np.ndarray:
    """``L`` with ``L L^T = K``; columns only for eigenvalues above ``cutoff``."""
    w, V = np.linalg.eigh(np.asarray(K, dtype=float))
    keep = w > cutoff
    return V[:, keep] * np.sqrt(w[keep])


@dataclass(frozen=True, eq=False)
class GaussianSampler:
    """Centered Gaussian on ``R^F`` with covariance ``kernel``; streams keyed by ``(seed, stream)``."""

    kernel: CovarianceKernel
    seed: int = DEFAULT_SEED
    stream: int = 0
    factor: np.ndarray = field(init=False)

    def __post_init__(self):
        L = pseudo_sqrt(self.kernel.matrix)
        if np.abs(L @ L.T - self.kernel.matrix).max(initial=0.0) > 1e-9:
            raise KernelError("pseudo square root does not reproduce the kernel")
        L.setflags(write=False)
        object.__setattr__(self, "factor", L)

    def substream(self, stream: int) -> "GaussianSampler":
        return GaussianSampler(self.kernel, self.seed, stream)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed & (2**64 - 1), spawn_key=(self.stream,))
        return np.random.default_rng(seq)


def sample(sampler: GaussianSampler, count: int) -> np.ndarray:
    """``count x |F|`` draws ``z = L xi``; the same sampler always gives the same rows."""
    if count < 1:
        raise ValueError("count must be positive")
    L = sampler.factor
    xi = sampler.generator().standard_normal((count, L.shape[1]))
    return xi @ L.T


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def mc_correlation(sampler: GaussianSampler, g: int, h: int, count: int) -> tuple[float, float]:
    """Estimate and standard error of ``E[z_g z_h]``."""
    z = sample(sampler, count)
    return _mean_se(z[:, g] * z[:, h])


def mc_kernel(sampler: GaussianSampler, count: int) -> tuple[np.ndarray, np.ndarray]:
    """All pairwise second moments from one batch, with standard errors."""
    z = sample(sampler, count)
    est = z.T @ z / count
    sq = (z**2).T @ (z**2) / count
    se = np.sqrt(np.maximum(sq - est**2, 0.0) * count / (count - 1) / count)
    return est, se


def mc_fourth_moment(
    sampler_a: GaussianSampler, sampler_b: GaussianSampler, g: int, tau: int, h: int, delta: int, count: int
) -> tuple[float, float]:
    """``E[z_g z_tau w_h w_delta]`` under the product of two independent samplers."""
    if (sampler_a.seed, sampler_a.stream) == (sampler_b.seed, sampler_b.stream):
        raise ValueError("samplers must use distinct streams")
    z, w = sample(sampler_a, count), sample(sampler_b, count)
    return _mean_se(z[:, g] * z[:, tau] * w[:, h] * w[:, delta])


# --- spatial strategies --------------------------------------------------


def solve_chi(
    rep_a: Callable, rep_b: Callable, rho, vartheta, support: Sequence[tuple[GroupWord, GroupWord]], psi, tol: float = 1e-9
) -> dict[tuple[GroupWord, GroupWord], float]:
    """Coefficients with ``psi = sum chi(g,h) (U_g rho) (x) (V_h vartheta)`` on ``support``."""
    cols = np.stack([np.kron(rep_a(g) @ rho, rep_b(h) @ vartheta) for g, h in support], axis=1)
    coef, *_ = np.linalg.lstsq(cols, np.asarray(psi, dtype=float), rcond=None)
    if np.abs(cols @ coef - psi).max() > tol:
        raise KernelError("psi is not in the span of the supplied support")
    return dict(zip(support, (float(c) for c in coef)))


def exact_unitary_spatial_table(
    rep_a: WordRepresentation, rep_b: WordRepresentation, psi, n: int, m: int, nx: int, ny: int
) -> DualCorrelationTable:
    """``p[x,y,j,k] = (1/nm) <(a(x,j) (x) b(y,k)) psi, psi>``."""
    psi = np.asarray(psi, dtype=float)
    C = psi.reshape(rep_a.dim, rep_b.dim)
    out = np.zeros((nx, ny, n, m))
    for x, y, j, k in itertools.product(range(nx), range(ny), range(n), range(m)):
        A = rep_a(letter(x, j, rep_a.orders))
        B = rep_b(letter(y, k, rep_b.orders))
        out[x, y, j, k] = np.sum(C * (A @ C @ B.T)) / (n * m)
    return DualCorrelationTable(out)


def realize_spatial_strategy_mc(
    chi: Mapping[tuple[GroupWord, GroupWord], float],
    rep_a: WordRepresentation,
    rep_b: WordRepresentation,
    rho,
    vartheta,
    words_a: Sequence[GroupWord],
    words_b: Sequence[GroupWord],
    n: int,
    m: int,
    nx: int,
    ny: int,
    count: int,
    seed: int = DEFAULT_SEED,
) -> tuple[DualCorrelationTable, np.ndarray]:
    """Monte-Carlo unitary spatial table from ``f = sum chi(g,h) z_g w_h``.

    Entry ``(x,y,j,k)`` is ``(1/nm) E[f_{x,j,y,k} f]`` where the shifted
    wavefunction uses coordinates ``(x,j) g`` and ``(y,k) h``.  Returns the
    estimate and its standard errors.
    """
    rho, vartheta = np.asarray(rho, dtype=float), np.asarray(vartheta, dtype=float)
    psi = sum(c * np.kron(rep_a(g) @ rho, rep_b(h) @ vartheta) for (g, h), c in chi.items())
    if abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise KernelError(f"chi builds a vector of norm {np.linalg.norm(psi)!r}")
    words_a, words_b = list(words_a), list(words_b)
    oa, ob = rep_a.orders, rep_b.orders
    for (g, h) in chi:
        if g not in words_a or h not in words_b:
            raise KernelError(f"support point ({g}, {h}) lies outside the word sets")
    sa = GaussianSampler(build_kernel(rep_a, rho, words_a, oa), seed, 0)
    sb = GaussianSampler(build_kernel(rep_b, vartheta, words_b, ob), seed, 1)
    z, w = sample(sa, count), sample(sb, count)
    ia, ib = {g: i for i, g in enumerate(words_a)}, {h: i for i, h in enumerate(words_b)}

    def field_(sx, sy):
        out = np.zeros(count)
        for (g, h), c in chi.items():
            gs, hs = word_multiply(sx, g, oa), word_multiply(sy, h, ob)
            if gs not in ia or hs not in ib:
                raise KernelError(f"shifted word ({gs}, {hs}) lies outside the word sets")
            out += c * z[:, ia[gs]] * w[:, ib[hs]]
        return out

    base = field_(GroupWord(), GroupWord())
    est = np.zeros((nx, ny, n, m))
    se = np.zeros_like(est)
    for x, y, j, k in itertools.product(range(nx), range(ny), range(n), range(m)):
        vals = field_(letter(x, j, oa), letter(y, k, ob)) * base / (n * m)
        est[x, y, j, k], se[x, y, j, k] = _mean_se(vals)
    return DualCorrelationTable(est), se


# --- CHSH data -----------------------------------------------------------


def _reflection(theta: float) -> np.ndarray:
    """``q_theta - q_hat_theta``, the wheel generator of the angular PVM."""
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[c, s], [s, -c]])


def chsh_representations(theta=(0.0, np.pi / 3), eta=(np.pi / 6, -np.pi / 6)):
    """Reflection representations of ``Z_2 * Z_2`` for Alice and Bob on ``R^2``."""
    ra = WordRepresentation(tuple(_reflection(t) for t in theta), (2, 2))
    rb = WordRepresentation(tuple(_reflection(t) for t in eta), (2, 2))
    return ra, rb


@dataclass(frozen=True, eq=False)
class ChshGaussianSetup:
    rep_a: WordRepresentation
    rep_b: WordRepresentation
    rho: np.ndarray
    vartheta: np.ndarray
    words: tuple[GroupWord, ...]
    chi: dict
    psi: np.ndarray


def chsh_gaussian_setup(max_length: int = 2) -> ChshGaussianSetup:
    """CHSH data with ``rho = i``, ``vartheta = j`` and a two-term ``chi`` for the Bell state.

    The support is the first pair of length-at-most-one words on each side
    (in enumeration order) that spans the Bell state.
    """
    ra, rb = chsh_representations()
    i_, j_ = np.eye(2)
    psi = (np.kron(i_, i_) + np.kron(j_, j_)) / np.sqrt(2)
    words = tuple(enumerate_words((2, 2), max_length))
    short = [w for w in words if len(w) <= 1]
    cands = list(itertools.product(short, short))
    for pair in itertools.combinations(cands, 2):
        try:
            chi = solve_chi(ra, rb, i_, j_, pair, psi)
        except KernelError:
            continue
        return ChshGaussianSetup(ra, rb, i_, j_, words, chi, psi)
    raise KernelError("no two-term support spans the Bell state")
