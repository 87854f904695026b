"""Observables on finite sample spaces and their observation operators.

Functions on a sample space are plain 1-D arrays indexed by atom.  Arrays of
``Fraction`` objects (``dtype=object``) pass through :func:`observation_apply`
untouched, which keeps small examples in exact arithmetic.

The inner product is always the weighted one,
``<f, g> = sum_u mu(u) f(u) conj(g(u))``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL
from .games import BareStrategy
from .quantum import ProjectionValuedMeasure

__all__ = [
    "ObservableError",
    "ConsistencyError",
    "FiniteSampleSpace",
    "Observable",
    "ConsistencyWitness",
    "inner",
    "l2_norm",
    "partial_average",
    "observation_apply",
    "observation_matrix",
    "to_euclidean",
    "from_euclidean",
    "check_consistency",
    "product_space",
    "lift_observable",
    "lift_function",
    "default_ladder",
    "ladder_projections",
    "materialize_pvm",
    "eval_statistical_commuting",
    "eval_statistical_spatial",
    "observable_from_json",
    "observable_to_json",
]


class ObservableError(ValueError):
    """Invalid sample space or observable; ``invariant`` names the violated rule."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class ConsistencyError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteSampleSpace:
    weights: tuple[float, ...]

    def __init__(self, weights: Sequence[float]):
        w = tuple(float(x) for x in weights)
        if not w:
            raise ObservableError("nonempty", "sample space has no atoms")
        if min(w) <= 0:
            raise ObservableError("positive_weights", "atom weights must be positive")
        if abs(sum(w) - 1) > DEFAULT_TOL.exact * max(1, len(w)):
            raise ObservableError("total_mass", f"weights sum to {sum(w)!r}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, size: int) -> "FiniteSampleSpace":
        return cls([1.0 / size] * size)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def mu(self) -> np.ndarray:
        return np.array(self.weights)


@dataclass(frozen=True, eq=False)
class Observable:
    """An equivalence relation with classes of size ``n`` and a class-bijective
    labelling ``c: atoms -> {1..n}``."""

    space: FiniteSampleSpace
    classes: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        classes = tuple(tuple(int(a) for a in c) for c in self.classes)
        labels = tuple(int(c) for c in self.labels)
        N = self.space.size
        if len(labels) != N:
            raise ObservableError("labels_cover_atoms", f"{len(labels)} labels for {N} atoms")
        seen = sorted(a for c in classes for a in c)
        if seen != list(range(N)):
            raise ObservableError("classes_partition", "classes do not partition the atoms")
        sizes = {len(c) for c in classes}
        if len(sizes) != 1:
            raise ObservableError("uniform_class_size", f"class sizes {sorted(sizes)}")
        n = sizes.pop()
        w = self.space.weights
        ordered = []
        for c in classes:
            if sorted(labels[a] for a in c) != list(range(1, n + 1)):
                raise ObservableError("class_bijective", f"labels on class {c} are not 1..{n}")
            if max(w[a] for a in c) - min(w[a] for a in c) > DEFAULT_TOL.exact:
                raise ObservableError("equal_class_weights", f"class {c} has unequal weights")
            ordered.append(sorted(c, key=labels.__getitem__))
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "labels", labels)
        order = np.array(ordered, dtype=int).reshape(len(classes), n)
        order.setflags(write=False)
        object.__setattr__(self, "_ordered", order)

    @property
    def resolution(self) -> int:
        return self._ordered.shape[1]

    @property
    def ordered(self) -> np.ndarray:
        """``ordered[c, i]`` is the atom of class ``c`` carrying label ``i + 1``."""
        return self._ordered

    def class_index(self) -> np.ndarray:
        idx = np.empty(self.space.size, dtype=int)
        for ci, c in enumerate(self.classes):
            idx[list(c)] = ci
        return idx

    @classmethod
    def single_class(cls, space: FiniteSampleSpace, labels: Sequence[int]) -> "Observable":
        return cls(space, (tuple(range(space.size)),), tuple(labels))

    @classmethod
    def trivial(cls, space: FiniteSampleSpace) -> "Observable":
        """Resolution one: every atom is its own class."""
        return cls(space, tuple((a,) for a in range(space.size)), (1,) * space.size)


@dataclass(frozen=True)
class ConsistencyWitness:
    blocks: tuple[tuple[int, ...], ...]
    product_labels: tuple[tuple[int, int], ...]


# --- inner products ------------------------------------------------------


def inner(space: FiniteSampleSpace, f, g) -> complex:
    return complex(np.sum(space.mu * np.asarray(f) * np.conj(np.asarray(g))))


def l2_norm(space: FiniteSampleSpace, f) -> float:
    return float(np.sqrt(np.sum(space.mu * np.abs(np.asarray(f, dtype=complex)) ** 2)))


def to_euclidean(space: FiniteSampleSpace, obj):
    """Unitary picture change ``L^2(mu) -> C^N``: vectors ``f -> sqrt(mu) f``,
    operators ``M -> D M D^-1`` with ``D = diag(sqrt(mu))``."""
    r = np.sqrt(space.mu)
    obj = np.asarray(obj)
    if obj.ndim == 1:
        return r * obj
    return (r[:, None] * obj) / r[None, :]


def from_euclidean(space: FiniteSampleSpace, obj):
    r = np.sqrt(space.mu)
    obj = np.asarray(obj)
    if obj.ndim == 1:
        return obj / r
    return (obj / r[:, None]) * r[None, :]


# --- averaging -----------------------------------------------------------


def partial_average(k: int, n: int, f) -> np.ndarray:
    """``I_k (+) A_{n-k}``: keep the first ``k`` coordinates, average the rest."""
    if not 0 <= k <= n:
        raise ValueError(f"order {k} outside 0..{n}")
    f = np.asarray(f)
    if f.shape != (n,):
        raise ValueError(f"expected a vector of length {n}")
    out = f.copy()
    if k < n:
        out[k:] = f[k:].sum() / (n - k)
    return out


def observation_apply(alpha: Observable, k: int, f) -> np.ndarray:
    """Observation operator of order ``k``; ``k = -1`` is the zero operator."""
    n = alpha.resolution
    if not -1 <= k <= n:
        raise ValueError(f"order {k} outside -1..{n}")
    f = np.asarray(f)
    if f.shape != (alpha.space.size,):
        raise ValueError("function does not live on the observable's sample space")
    if k == -1:
        return f * 0
    out = f.copy()
    if k < n:
        tail = alpha.ordered[:, k:]
        means = f[tail].sum(axis=1) / (n - k)
        out[tail] = means[:, None]
    return out


def observation_matrix(alpha: Observable, k: int) -> np.ndarray:
    """Matrix of ``O_{alpha,k}`` in the atom basis (acting on column vectors)."""
    N = alpha.space.size
    eye = np.eye(N)
    return np.stack([observation_apply(alpha, k, eye[:, j]) for j in range(N)], axis=1)


# --- consistency and lifting ---------------------------------------------


def _components(N: int, *observables: Observable) -> list[list[int]]:
    parent = list(range(N))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for obs in observables:
        for c in obs.classes:
            for a in c[1:]:
                ra, rb = find(a), find(c[0])
                if ra != rb:
                    parent[ra] = rb
    comps: dict[int, list[int]] = {}
    for a in range(N):
        comps.setdefault(find(a), []).append(a)
    return sorted(comps.values())


def check_consistency(alpha: Observable, beta: Observable) -> ConsistencyWitness:
    """Build the joint ``n*m`` block structure or raise :class:`ConsistencyError`.

    Besides saturation and joint class-bijectivity, every ``alpha``-class must
    carry a single ``beta``-label and vice versa, so each block is an
    ``n x m`` grid on which ``alpha`` acts along rows and ``beta`` along
    columns.  Without this the observation operators need not commute.
    """
    if alpha.space != beta.space:
        raise ConsistencyError("observables live on different sample spaces")
    n, m = alpha.resolution, beta.resolution
    blocks = _components(alpha.space.size, alpha, beta)
    for blk in blocks:
        if len(blk) != n * m:
            raise ConsistencyError(
                f"saturated block {blk[:6]}... has {len(blk)} atoms, need {n * m}"
            )
        pairs = {(alpha.labels[u], beta.labels[u]) for u in blk}
        if len(pairs) != n * m:
            raise ConsistencyError(f"joint labels are not bijective on block {blk}")
    for obs, other, name in ((alpha, beta, "alpha"), (beta, alpha, "beta")):
        for c in obs.classes:
            if len({other.labels[u] for u in c}) != 1:
                raise ConsistencyError(f"{name}-class {c} is not a grid line of its block")
    product = tuple((alpha.labels[u], beta.labels[u]) for u in range(alpha.space.size))
    return ConsistencyWitness(tuple(tuple(b) for b in blocks), product)


def product_space(lam: FiniteSampleSpace, pi: FiniteSampleSpace) -> FiniteSampleSpace:
    """Atoms ``(s, t)`` are indexed ``s * |Pi| + t``."""
    return FiniteSampleSpace(np.outer(lam.mu, pi.mu).ravel())


def lift_observable(alpha: Observable, other: FiniteSampleSpace, side: str = "left") -> Observable:
    """Lift to ``Lambda x Pi``; ``side`` says which factor ``alpha`` lives on."""
    if side == "left":
        lam, pi = alpha.space, other
        idx = lambda s, t: s * pi.size + t  # noqa: E731
        classes = [tuple(idx(s, t) for s in c) for c in alpha.classes for t in range(pi.size)]
        labels = [alpha.labels[s] for s in range(lam.size) for t in range(pi.size)]
    elif side == "right":
        lam, pi = other, alpha.space
        idx = lambda s, t: s * pi.size + t  # noqa: E731
        classes = [tuple(idx(s, t) for t in c) for s in range(lam.size) for c in alpha.classes]
        labels = [alpha.labels[t] for s in range(lam.size) for t in range(pi.size)]
    else:
        raise ValueError("side must be 'left' or 'right'")
    return Observable(product_space(lam, pi), tuple(classes), tuple(labels))


def lift_function(f, size_other: int, side: str = "left") -> np.ndarray:
    """``f(s)`` on the left factor (or ``f(t)`` on the right) as a function on the product."""
    f = np.asarray(f)
    if side == "left":
        return np.repeat(f, size_other)
    return np.tile(f, size_other)


# --- ladders and strategy evaluation -------------------------------------


def default_ladder(resolution: int) -> tuple[int, ...]:
    return tuple(range(-1, resolution))


def _check_ladder(ladder: Sequence[int], resolution: int) -> tuple[int, ...]:
    ladder = tuple(int(t) for t in ladder)
    if len(ladder) < 2:
        raise ValueError("a ladder needs at least two rungs")
    if any(b < a for a, b in zip(ladder, ladder[1:])):
        raise ValueError(f"ladder {ladder} is not nondecreasing")
    if ladder[0] < -1 or ladder[-1] != resolution - 1:
        raise ValueError(f"ladder {ladder} must run from >= -1 up to {resolution - 1}")
    return ladder


def ladder_projections(alpha: Observable, ladder: Sequence[int], f) -> list[np.ndarray]:
    """``(O_{t_a} - O_{t_{a-1}})[f]`` for each answer ``a``."""
    ladder = _check_ladder(ladder, alpha.resolution)
    images = [observation_apply(alpha, t, f) for t in ladder]
    return [images[i + 1] - images[i] for i in range(len(ladder) - 1)]


def materialize_pvm(alpha: Observable, ladder: Sequence[int] | None = None) -> ProjectionValuedMeasure:
    """Ladder differences as a PVM on ``C^N`` (Euclidean picture).

    A leading rung ``t_0 > -1`` is folded into answer 0 so the projections
    sum to the identity; on wavefunctions annihilated by ``O_{t_0}`` the
    resulting table is unchanged.
    """
    ladder = _check_ladder(ladder or default_ladder(alpha.resolution), alpha.resolution)
    mats = [observation_matrix(alpha, t) if t >= 0 else 0 * np.eye(alpha.space.size) for t in ladder]
    mats[0] = 0 * mats[0]
    projs = [to_euclidean(alpha.space, mats[i + 1] - mats[i]) for i in range(len(mats) - 1)]
    return ProjectionValuedMeasure(projs)


def _validate_wavefunction(space: FiniteSampleSpace, f, tol: float) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape != (space.size,):
        raise ValueError("wavefunction does not live on the sample space")
    if abs(l2_norm(space, f) - 1) > tol:
        raise ValueError(f"wavefunction has L2 norm {l2_norm(space, f)!r}")
    return f


def _annihilation(obs: Observable, ladder, f, tol: float):
    if ladder[0] > -1:
        resid = l2_norm(obs.space, observation_apply(obs, ladder[0], f))
        if resid > tol:
            raise ValueError(f"O_{ladder[0]} does not annihilate the wavefunction ({resid:.3e})")


def eval_statistical_commuting(
    alphas: Sequence[Observable],
    betas: Sequence[Observable],
    f,
    ladder_a: Sequence[int] | None = None,
    ladder_b: Sequence[int] | None = None,
    tol=DEFAULT_TOL,
) -> BareStrategy:
    space = alphas[0].space
    if any(o.space != space for o in (*alphas, *betas)):
        raise ValueError("all observables must share one sample space")
    for x, a in enumerate(alphas):
        for y, b in enumerate(betas):
            try:
                check_consistency(a, b)
            except ConsistencyError as err:
                raise ConsistencyError(f"alpha_{x} and beta_{y}: {err}") from None
    f = _validate_wavefunction(space, f, tol.operator)
    la = [_check_ladder(ladder_a or default_ladder(a.resolution), a.resolution) for a in alphas]
    lb = [_check_ladder(ladder_b or default_ladder(b.resolution), b.resolution) for b in betas]
    if len({len(l) for l in la}) != 1 or len({len(l) for l in lb}) != 1:
        raise ValueError("every question of one player needs the same number of answers")
    for obs, ladder in (*zip(alphas, la), *zip(betas, lb)):
        _annihilation(obs, ladder, f, tol.operator)
    pa = [ladder_projections(a, l, f) for a, l in zip(alphas, la)]
    pb = [ladder_projections(b, l, f) for b, l in zip(betas, lb)]
    mu = space.mu
    cells = np.einsum("u,xau,ybu->xyab", mu, np.array(pa), np.conj(np.array(pb)))
    if np.abs(cells.imag).max(initial=0.0) > tol.structural:
        raise ValueError("statistical table has a non-negligible imaginary part")
    return BareStrategy(cells.real, tol=tol.structural)


def eval_statistical_spatial(
    alphas: Sequence[Observable],
    betas: Sequence[Observable],
    f,
    ladder_a: Sequence[int] | None = None,
    ladder_b: Sequence[int] | None = None,
    tol=DEFAULT_TOL,
) -> BareStrategy:
    """Observables on ``Lambda`` and ``Pi``; ``f`` on ``Lambda x Pi`` (atom ``s*|Pi|+t``)."""
    lam, pi = alphas[0].space, betas[0].space
    lifted_a = [lift_observable(a, pi, "left") for a in alphas]
    lifted_b = [lift_observable(b, lam, "right") for b in betas]
    return eval_statistical_commuting(lifted_a, lifted_b, f, ladder_a, ladder_b, tol)


# --- JSON ----------------------------------------------------------------


def observable_to_json(alpha: Observable) -> str:
    return json.dumps(
        {
            "weights": list(alpha.space.weights),
            "classes": [list(c) for c in alpha.classes],
            "labels": list(alpha.labels),
        }
    )


def observable_from_json(text: str) -> Observable:
    data = json.loads(text)
    for key in ("weights", "classes", "labels"):
        if key not in data:
            raise ObservableError("schema", f"missing field {key!r}")
    return Observable(FiniteSampleSpace(data["weights"]), data["classes"], data["labels"])
