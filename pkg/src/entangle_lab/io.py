"""JSON I/O for games and strategy tables.

Game format::

    {"questions_a": [...], "questions_b": [...], "answers_a": n, "answers_b": m,
     "pi": [[...], ...], "payoff": {"x,y": [[0/1 ...], ...], ...}}

``pi`` entries may be numbers or rational strings such as ``"1/4"``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .games import BareStrategy, GameError, NonlocalGame

__all__ = [
    "ParseError",
    "parse_game",
    "load_game",
    "game_to_json",
    "parse_strategy",
    "load_strategy",
    "bundled_game",
]


class ParseError(ValueError):
    """Malformed input; the message starts with a position or field path."""


def _loads(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{source}:{err.lineno}:{err.colno}: {err.msg}") from None


def _fraction(v, where: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ParseError(f"{where}: expected a number or rational string, got {v!r}")
    try:
        return Fraction(str(v)) if not isinstance(v, str) else Fraction(v.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: cannot read {v!r} as a number") from None


def parse_game(text: str, source: str = "<game>") -> NonlocalGame:
    obj = _loads(text, source)
    if not isinstance(obj, dict):
        raise ParseError(f"{source}: top level must be an object")
    for key in ("questions_a", "questions_b", "answers_a", "answers_b", "pi", "payoff"):
        if key not in obj:
            raise ParseError(f"{source}: missing field {key!r}")
    qa, qb = obj["questions_a"], obj["questions_b"]
    n, m = obj["answers_a"], obj["answers_b"]
    if not isinstance(qa, list) or not isinstance(qb, list) or not qa or not qb:
        raise ParseError(f"{source}: questions_a and questions_b must be nonempty lists")
    if not isinstance(n, int) or not isinstance(m, int) or n < 1 or m < 1:
        raise ParseError(f"{source}: answers_a and answers_b must be positive integers")
    pi_rows = obj["pi"]
    if not isinstance(pi_rows, list) or len(pi_rows) != len(qa):
        raise ParseError(f"{source}: pi must have {len(qa)} rows")
    pi = []
    for x, row in enumerate(pi_rows):
        if not isinstance(row, list) or len(row) != len(qb):
            raise ParseError(f"{source}: pi[{x}] must have {len(qb)} entries")
        pi.append([_fraction(v, f"{source}: pi[{x}][{y}]") for y, v in enumerate(row)])
    total = sum(sum(r) for r in pi)
    if abs(float(total) - 1.0) > 1e-12:
        raise ParseError(f"{source}: pi sums to {float(total)!r}, not 1")
    if any(v < 0 for r in pi for v in r):
        raise ParseError(f"{source}: pi has negative entries")

    payoff = np.zeros((len(qa), len(qb), n, m), dtype=np.int8)
    table = obj["payoff"]
    if not isinstance(table, dict):
        raise ParseError(f"{source}: payoff must be an object keyed by 'x,y'")
    keys = {f"{a},{b}": (x, y) for x, a in enumerate(qa) for y, b in enumerate(qb)}
    for key, (x, y) in keys.items():
        if key not in table:
            raise ParseError(f"{source}: payoff[{key!r}] is missing")
        block = table[key]
        if not isinstance(block, list) or len(block) != n or any(
            not isinstance(r, list) or len(r) != m for r in block
        ):
            raise ParseError(f"{source}: payoff[{key!r}] must be an {n}x{m} array")
        for a, r in enumerate(block):
            for b, v in enumerate(r):
                if v not in (0, 1) or isinstance(v, bool):
                    raise ParseError(f"{source}: payoff[{key!r}][{a}][{b}] = {v!r} is not 0/1")
                payoff[x, y, a, b] = v
    extra = set(table) - set(keys)
    if extra:
        raise ParseError(f"{source}: payoff has unknown question pair {sorted(extra)[0]!r}")
    try:
        return NonlocalGame.from_arrays(pi, payoff, qa, qb)
    except GameError as err:
        raise ParseError(f"{source}: {err}") from None


def load_game(path) -> NonlocalGame:
    path = Path(path)
    return parse_game(path.read_text(), str(path))


def game_to_json(game: NonlocalGame) -> str:
    nx, ny = len(game.questions_a), len(game.questions_b)
    if game.pi_exact is not None:
        pi = [[str(game.pi_exact[x * ny + y]) for y in range(ny)] for x in range(nx)]
    else:
        pi = game.pi.tolist()
    payoff = {
        f"{a},{b}": game.payoff[x, y].tolist()
        for x, a in enumerate(game.questions_a)
        for y, b in enumerate(game.questions_b)
    }
    return json.dumps(
        {
            "questions_a": list(game.questions_a),
            "questions_b": list(game.questions_b),
            "answers_a": game.n,
            "answers_b": game.m,
            "pi": pi,
            "payoff": payoff,
        },
        indent=1,
    )


def parse_strategy(text: str, source: str = "<strategy>") -> BareStrategy:
    """Either a bare 4-d nested list or ``{"table": ...}``."""
    obj = _loads(text, source)
    if isinstance(obj, dict):
        if "table" not in obj:
            raise ParseError(f"{source}: missing field 'table'")
        obj = obj["table"]
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{source}: table is not a rectangular numeric array") from None
    if arr.ndim != 4:
        raise ParseError(f"{source}: table must be 4-dimensional, got shape {arr.shape}")
    try:
        return BareStrategy(arr, tol=1e-6)
    except ValueError as err:
        raise ParseError(f"{source}: {err}") from None


def load_strategy(path) -> BareStrategy:
    path = Path(path)
    return parse_strategy(path.read_text(), str(path))


def bundled_game(name: str) -> NonlocalGame:
    text = resources.files("entangle_lab").joinpath("data").joinpath(f"{name}.json").read_text()
    return parse_game(text, f"{name}.json")
