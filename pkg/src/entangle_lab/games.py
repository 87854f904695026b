"""Nonlocal games, bare strategies, game values and the 2D Fourier transform.

Answers are always the integers ``0..n-1`` and ``0..m-1``; question labels are
kept only for I/O.  Strategy tables are dense arrays of shape
``(|X|, |Y|, n, m)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL

__all__ = [
    "NonlocalGame",
    "BareStrategy",
    "DualCorrelationTable",
    "GameValue",
    "StrategyError",
    "GameError",
    "chsh_game",
    "evaluate_game",
    "classical_value_bruteforce",
    "deterministic_strategy",
    "fourier_transform_2d",
    "inverse_fourier_transform_2d",
    "dual_game_value",
]


class GameError(ValueError):
    """Malformed game data."""


class StrategyError(ValueError):
    """A table that is not a valid strategy for the game at hand."""


def _as_exact(values) -> list[Fraction] | None:
    try:
        return [Fraction(str(v)) if not isinstance(v, Fraction) else v for v in values]
    except (ValueError, ZeroDivisionError):
        return None


@dataclass(frozen=True)
class NonlocalGame:
    questions_a: tuple
    questions_b: tuple
    n: int
    m: int
    pi: np.ndarray  # (|X|, |Y|)
    payoff: np.ndarray  # (|X|, |Y|, n, m), entries 0/1
    pi_exact: tuple[Fraction, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        payoff = np.asarray(self.payoff)
        nx, ny = len(self.questions_a), len(self.questions_b)
        if self.n < 1 or self.m < 1:
            raise GameError("answer counts must be positive")
        if pi.shape != (nx, ny):
            raise GameError(f"pi has shape {pi.shape}, expected {(nx, ny)}")
        if payoff.shape != (nx, ny, self.n, self.m):
            raise GameError(
                f"payoff has shape {payoff.shape}, expected {(nx, ny, self.n, self.m)}"
            )
        if np.any(pi < 0):
            raise GameError("pi has negative entries")
        if abs(pi.sum() - 1.0) > DEFAULT_TOL.exact:
            raise GameError(f"pi sums to {pi.sum()!r}, not 1")
        bad = np.argwhere((payoff != 0) & (payoff != 1))
        if bad.size:
            raise GameError(f"payoff entry at {tuple(int(i) for i in bad[0])} is not 0/1")
        pi.setflags(write=False)
        payoff = payoff.astype(np.int8)
        payoff.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "payoff", payoff)
        if self.pi_exact is not None and sum(self.pi_exact) != 1:
            object.__setattr__(self, "pi_exact", None)

    @classmethod
    def from_arrays(cls, pi, payoff, questions_a=None, questions_b=None) -> "NonlocalGame":
        payoff = np.asarray(payoff)
        nx, ny, n, m = payoff.shape
        pi_list = np.asarray(pi, dtype=object).ravel().tolist()
        exact = _as_exact(pi_list)
        if exact is not None and sum(exact) != 1:
            exact = None
        return cls(
            tuple(range(nx)) if questions_a is None else tuple(questions_a),
            tuple(range(ny)) if questions_b is None else tuple(questions_b),
            n,
            m,
            np.array([float(v) for v in pi_list]).reshape(nx, ny),
            payoff,
            None if exact is None else tuple(exact),
        )

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.payoff.shape


def chsh_game() -> NonlocalGame:
    """CHSH: uniform questions, win iff ``x AND y == a XOR b``."""
    payoff = np.zeros((2, 2, 2, 2), dtype=np.int8)
    for x, y, a, b in itertools.product(range(2), repeat=4):
        payoff[x, y, a, b] = int((x & y) == (a ^ b))
    return NonlocalGame.from_arrays([[Fraction(1, 4)] * 2] * 2, payoff, (0, 1), (0, 1))


@dataclass(frozen=True)
class BareStrategy:
    """Probability tables ``p[x, y, a, b]``; validated on construction."""

    table: np.ndarray
    tol: float = field(default=DEFAULT_TOL.structural, compare=False, repr=False)

    def __post_init__(self):
        t = np.asarray(self.table)
        if np.iscomplexobj(t):
            if np.abs(t.imag).max(initial=0.0) > self.tol:
                raise StrategyError("strategy table has non-negligible imaginary part")
            t = t.real
        t = np.array(t, dtype=float)
        if t.ndim != 4:
            raise StrategyError(f"strategy table must be 4-dimensional, got shape {t.shape}")
        if t.min(initial=0.0) < -self.tol or t.max(initial=0.0) > 1 + self.tol:
            raise StrategyError("strategy entries outside [0, 1]")
        sums = t.sum(axis=(2, 3))
        worst = np.abs(sums - 1).max(initial=0.0)
        if worst > self.tol:
            x, y = np.unravel_index(np.abs(sums - 1).argmax(), sums.shape)
            raise StrategyError(f"row ({x},{y}) sums to {sums[x, y]!r}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def shape(self):
        return self.table.shape

    def mix(self, other: "BareStrategy", weight: float) -> "BareStrategy":
        return BareStrategy(weight * self.table + (1 - weight) * other.table)


@dataclass(frozen=True)
class DualCorrelationTable:
    """Complex tables indexed like strategies (Fourier duals, ergodic correlations)."""

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=complex)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def to_strategy(self, tol: float = DEFAULT_TOL.structural) -> BareStrategy:
        """Inverse 2D Fourier transform of every cell, checked as a bare strategy."""
        return BareStrategy(inverse_fourier_transform_2d(self.table), tol=tol)


@dataclass(frozen=True)
class GameValue:
    value: float
    exact: Fraction | None = None
    witness: tuple | None = field(default=None, compare=False)

    def __float__(self) -> float:
        return self.value


def _coerce_table(game: NonlocalGame, strategy) -> np.ndarray:
    if isinstance(strategy, BareStrategy):
        table = strategy.table
    else:
        table = np.asarray(strategy, dtype=float)
        if table.shape == game.shape:
            sums = table.sum(axis=(2, 3))
            if np.abs(sums - 1).max() > DEFAULT_TOL.row_sum_error:
                raise StrategyError("row sums deviate from 1 by more than 1e-6")
    if table.shape != game.shape:
        raise StrategyError(f"strategy shape {table.shape} does not match game {game.shape}")
    return table


def evaluate_game(game: NonlocalGame, strategy) -> GameValue:
    table = _coerce_table(game, strategy)
    value = np.einsum("xy,xyab,xyab->", game.pi, game.payoff, table)
    return GameValue(float(value))


def deterministic_strategy(game: NonlocalGame, f: Sequence[int], g: Sequence[int]) -> BareStrategy:
    nx, ny, n, m = game.shape
    t = np.zeros(game.shape)
    for x in range(nx):
        for y in range(ny):
            t[x, y, f[x], g[y]] = 1.0
    return BareStrategy(t)


def classical_value_bruteforce(game: NonlocalGame, cap: int = 10**7) -> GameValue:
    """Maximum over deterministic assignments ``f: X -> A``, ``g: Y -> B``.

    For each ``f`` the best ``g`` is chosen question by question, which is
    exact because the value is separable in ``g`` once ``f`` is fixed.
    """
    nx, ny, n, m = game.shape
    if n**nx * m**ny > cap:
        raise GameError(f"enumeration of {n**nx * m**ny} assignments exceeds cap {cap}")
    exact = game.pi_exact is not None
    if exact:
        pi = [[game.pi_exact[x * ny + y] for y in range(ny)] for x in range(nx)]
    D = game.payoff
    best, best_fg = None, None
    for f in itertools.product(range(n), repeat=nx):
        if exact:
            total, g = Fraction(0), []
            for y in range(ny):
                scores = [sum((pi[x][y] for x in range(nx) if D[x, y, f[x], b]), Fraction(0))
                          for b in range(m)]
                b_best = max(range(m), key=scores.__getitem__)
                g.append(b_best)
                total += scores[b_best]
        else:
            w = np.einsum("xy,xyb->yb", game.pi, D[np.arange(nx), :, list(f), :])
            g = list(w.argmax(axis=1))
            total = float(w.max(axis=1).sum())
        if best is None or total > best:
            best, best_fg = total, (tuple(f), tuple(int(b) for b in g))
    if exact:
        return GameValue(float(best), best, best_fg)
    return GameValue(best, None, best_fg)


def fourier_transform_2d(phi) -> np.ndarray:
    """``phi_hat(j, k) = (1/nm) sum_{s,t} e_n(-js) e_m(-kt) phi(s, t)``.

    Leading axes are batch axes; the transform acts on the last two.
    """
    phi = np.asarray(phi, dtype=complex)
    n, m = phi.shape[-2:]
    return np.fft.fft2(phi, axes=(-2, -1)) / (n * m)


def inverse_fourier_transform_2d(phi_hat) -> np.ndarray:
    phi_hat = np.asarray(phi_hat, dtype=complex)
    n, m = phi_hat.shape[-2:]
    return np.fft.ifft2(phi_hat, axes=(-2, -1)) * (n * m)


def dual_game_value(game: NonlocalGame, strategy) -> complex:
    """``sum_{x,y} pi(x,y) sum_{j,k} D_hat(x,y,j,k) p_{x,y}(j,k)``."""
    table = _coerce_table(game, strategy)
    d_hat = fourier_transform_2d(game.payoff)
    return complex(np.einsum("xy,xyjk,xyjk->", game.pi, d_hat, table))
