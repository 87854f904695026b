"""Command-line entry point: ``entangle-lab <command> [flags]``.

Exit status is 0 when every pass flag holds, 1 when one fails, 2 on usage
or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .report import Report, digest

__all__ = ["RunConfig", "run", "main", "COMMANDS"]

COMMANDS = ("chsh", "chsh-stat", "eval", "classical", "duality-check", "gauss-mc", "props")
DEFAULT_SEED = 0xC0FFEE
SEED_ENV = "ENTANGLE_LAB_SEED"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int = DEFAULT_SEED
    tol: float | None = None
    game: str | None = None
    strategy: str | None = None
    samples: int = 10**6
    words: int = 2
    trials: int | None = None
    output: str | None = None
    json: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.samples < 2:
            raise UsageError("--samples must be at least 2")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("--tol must be positive")

    def echo(self) -> str:
        d = {k: getattr(self, k) for k in ("command", "seed", "tol", "game", "strategy", "samples", "words", "trials")}
        return json.dumps(d, sort_keys=True)


def _tol(cfg: RunConfig, default: float) -> float:
    return cfg.tol if cfg.tol is not None else default


def _game(cfg: RunConfig):
    from .io import bundled_game, load_game

    if cfg.game in (None, "chsh"):
        return bundled_game("chsh"), b"chsh"
    path = Path(cfg.game)
    return load_game(path), path.read_bytes()


# --- commands -------------------------------------------------------------


def _cmd_chsh(cfg: RunConfig, rep: Report):
    from .games import chsh_game, classical_value_bruteforce
    from .quantum import AngularAssignment, angular_chsh_strategy, angular_chsh_value, chsh_value_closed_form

    tol = _tol(cfg, 1e-9)
    game = chsh_game()
    cl = classical_value_bruteforce(game)
    ang = AngularAssignment.standard()
    vals = {
        "closed_form": chsh_value_closed_form(ang).value,
        "quantum_spatial": angular_chsh_value(ang).value,
    }
    rep.results.update(classical=cl.value, classical_exact=str(cl.exact), angular=vals["quantum_spatial"], **vals)
    rep.table = angular_chsh_strategy(ang).table
    for k, v in vals.items():
        rep.residuals[k] = abs(v - 13 / 16)
        rep.passed[f"{k}_is_13/16"] = rep.residuals[k] < tol
    rep.passed["classical_is_3/4"] = str(cl.exact) == "3/4"


def _cmd_chsh_stat(cfg: RunConfig, rep: Report):
    from .chsh import build_chsh_statistical, chsh_ergodic_realization

    tol = _tol(cfg, 1e-10)
    r = build_chsh_statistical()
    erg = chsh_ergodic_realization(r)
    rep.results.update(
        value=r.value.value,
        classical=r.classical.value,
        schmidt=list(r.schmidt.schmidt_coefficients),
        entangled=not r.schmidt.classical,
        pairing=r.pairing,
    )
    rep.table = r.strategy.table
    rep.residuals.update(
        value=abs(r.value.value - 13 / 16),
        angular_table=r.angular_deviation,
        angle_equations=r.max_angle_residual,
        ergodic_dual=erg.residual,
    )
    for k, v in rep.residuals.items():
        rep.passed[k] = v < tol


def _cmd_eval(cfg: RunConfig, rep: Report):
    from .games import evaluate_game
    from .io import load_strategy

    if not cfg.strategy:
        raise UsageError("eval needs --strategy PATH")
    game, _ = _game(cfg)
    strat = load_strategy(cfg.strategy)
    v = evaluate_game(game, strat)
    rep.results["value"] = v.value
    rep.table = strat.table
    rep.passed["valid_strategy"] = True


def _cmd_classical(cfg: RunConfig, rep: Report):
    from .games import classical_value_bruteforce

    game, _ = _game(cfg)
    v = classical_value_bruteforce(game)
    rep.results.update(value=v.value, exact=None if v.exact is None else str(v.exact), witness=v.witness)
    rep.passed["enumerated"] = True


def _cmd_duality(cfg: RunConfig, rep: Report):
    from .suites import duality_suite

    s = duality_suite(cfg.seed, cfg.trials or 100)
    s.tol = _tol(cfg, s.tol)
    rep.results["trials"] = s.trials
    rep.results["failures"] = s.failures
    rep.residuals.update(s.residuals)
    rep.passed["duality"] = s.passed


def _cmd_props(cfg: RunConfig, rep: Report):
    from .chsh import noncommutation_witness
    from .suites import dictionary_suite, inclusion_suite

    trials = cfg.trials
    for suite in (dictionary_suite(cfg.seed, trials or 200), inclusion_suite(cfg.seed, trials or 100)):
        suite.tol = _tol(cfg, suite.tol)
        for k, v in suite.residuals.items():
            rep.residuals[f"{suite.name}.{k}"] = v
        rep.results[f"{suite.name}_failures"] = suite.failures
        rep.passed[suite.name] = suite.passed
    w = noncommutation_witness()
    rep.results["noncommutation"] = {
        "beta_alpha_f": [str(v) for v in w.beta_then_alpha],
        "alpha_beta_f": [str(v) for v in w.alpha_then_beta],
    }
    rep.passed["noncommutation"] = str(w.beta_then_alpha[w.atom]) == "-1/2" and w.alpha_then_beta[w.atom] == 0


def _cmd_gauss(cfg: RunConfig, rep: Report):
    from .gaussian import (
        GaussianSampler,
        build_kernel,
        chsh_gaussian_setup,
        exact_unitary_spatial_table,
        mc_kernel,
        realize_spatial_strategy_mc,
    )

    if cfg.game not in (None, "chsh"):
        raise UsageError("gauss-mc supports only --game chsh")
    s = chsh_gaussian_setup(cfg.words)
    N = cfg.samples
    band = _tol(cfg, 0.02)
    rep.results["words"] = [str(w) for w in s.words]
    for side, r, v, stream in (("alice", s.rep_a, s.rho, 2), ("bob", s.rep_b, s.vartheta, 3)):
        k = build_kernel(r, v, s.words, r.orders)
        est, se = mc_kernel(GaussianSampler(k, cfg.seed, stream), N)
        err = np.abs(est - k.matrix)
        rep.results[f"{side}_kernel"] = k.matrix
        rep.results[f"{side}_estimate"] = est
        rep.results[f"{side}_standard_error"] = se
        rep.residuals[f"{side}_kernel"] = float(err.max())
        rep.passed[f"{side}_kernel_within_4se"] = bool(np.all(err <= 4 * se + 1e-12))
        rep.passed[f"{side}_kernel_within_band"] = bool(err.max() <= band)
    exact = exact_unitary_spatial_table(s.rep_a, s.rep_b, s.psi, 2, 2, 2, 2).table
    est, se = realize_spatial_strategy_mc(
        s.chi, s.rep_a, s.rep_b, s.rho, s.vartheta, s.words, s.words, 2, 2, 2, 2, N, cfg.seed
    )
    rep.table = est.table
    rep.results["chi"] = {f"{g}|{h}": c for (g, h), c in s.chi.items()}
    rep.results["exact_dual_table"] = exact
    rep.residuals["spatial_table"] = float(np.abs(est.table - exact).max())
    rep.passed["spatial_table_within_band"] = rep.residuals["spatial_table"] <= band


_DISPATCH = {
    "chsh": _cmd_chsh,
    "chsh-stat": _cmd_chsh_stat,
    "eval": _cmd_eval,
    "classical": _cmd_classical,
    "duality-check": _cmd_duality,
    "gauss-mc": _cmd_gauss,
    "props": _cmd_props,
}


def run(cfg: RunConfig) -> Report:
    extra = b""
    for p in (cfg.game, cfg.strategy):
        if p and p != "chsh" and Path(p).exists():
            extra += Path(p).read_bytes()
    rep = Report(cfg.command, digest(cfg.echo(), extra))
    t0 = time.perf_counter()
    _DISPATCH[cfg.command](cfg, rep)
    rep.wall_time = time.perf_counter() - t0
    return rep


# --- argument parsing -----------------------------------------------------


def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--game", help="game JSON path, or 'chsh' for the bundled game")
    common.add_argument("--strategy", help="strategy JSON path")
    common.add_argument("--seed", type=_seed, help=f"64-bit seed (default ${SEED_ENV} or {DEFAULT_SEED:#x})")
    common.add_argument("--samples", type=int, default=10**6, help="Monte-Carlo sample count")
    common.add_argument("--words", type=int, default=2, help="maximum word length")
    common.add_argument("--trials", type=int, help="randomized trials for suites")
    common.add_argument("--tol", type=float, help="override the pass threshold")
    common.add_argument("--output", help="write the report here (.csv writes the table)")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    parser = argparse.ArgumentParser(prog="entangle-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for c in COMMANDS:
        sub.add_parser(c, parents=[common])
    return parser


def main(argv=None) -> int:
    from .io import ParseError

    parser = build_parser()
    args = parser.parse_args(argv)
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env, 0) if env else DEFAULT_SEED
        except ValueError:
            print(f"error: {SEED_ENV}={env!r} is not an integer", file=sys.stderr)
            return 2
    try:
        cfg = RunConfig(
            args.command, seed, args.tol, args.game, args.strategy, args.samples, args.words,
            args.trials, args.output, args.json,
        )
        rep = run(cfg)
    except (UsageError, ParseError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if cfg.output:
        out = Path(cfg.output)
        try:
            if out.suffix == ".csv":
                out.write_text(rep.to_csv())
            else:
                out.write_text(rep.to_json() if cfg.json or out.suffix == ".json" else rep.to_text())
        except (OSError, ValueError) as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
    print(rep.to_json() if cfg.json else rep.to_text())
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
