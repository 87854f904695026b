"""The eight acceptance checks, each returning a timed pass/fail record.

Shared by ``tests/test_acceptance.py`` and ``scripts/run_acceptance.py``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    elapsed: float
    time_limit: float | None
    details: dict = field(default_factory=dict)

    @property
    def in_time(self) -> bool:
        return self.time_limit is None or self.elapsed < self.time_limit

    @property
    def ok(self) -> bool:
        return self.passed and self.in_time

    def line(self) -> str:
        limit = f" (limit {self.time_limit:g} s)" if self.time_limit else ""
        info = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"{'PASS' if self.ok else 'FAIL'} criterion {self.number}: {self.title} [{self.elapsed:.2f} s{limit}] {info}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def c1_classical() -> tuple[bool, dict]:
    from .games import chsh_game, classical_value_bruteforce

    v = classical_value_bruteforce(chsh_game())
    return v.exact == Fraction(3, 4), {"value": str(v.exact)}


def c2_angular() -> tuple[bool, dict]:
    from .games import chsh_game, evaluate_game
    from .quantum import AngularAssignment, angular_chsh_strategy, angular_chsh_value, chsh_value_closed_form

    ang = AngularAssignment.standard()
    vals = {
        "closed_form": chsh_value_closed_form(ang).value,
        "quantum_spatial": angular_chsh_value(ang).value,
        "evaluate_game": evaluate_game(chsh_game(), angular_chsh_strategy(ang)).value,
    }
    err = max(abs(v - 13 / 16) for v in vals.values())
    return err < 1e-9, {"max_error": err}


def c3_statistical() -> tuple[bool, dict]:
    from .chsh import build_chsh_statistical

    r = build_chsh_statistical()
    d = {
        "value_error": abs(r.value.value - 13 / 16),
        "table_error": r.angular_deviation,
        "angle_residual": r.max_angle_residual,
    }
    # one report per player and angle, six residuals each
    ok = all(v < 1e-10 for v in d.values()) and len(r.reports) == 4
    return ok, d


def c4_noncommutation() -> tuple[bool, dict]:
    from .chsh import noncommutation_witness

    w = noncommutation_witness()
    ba, ab = w.beta_then_alpha[w.atom], w.alpha_then_beta[w.atom]
    exact = all(isinstance(v, Fraction) for v in w.beta_then_alpha + w.alpha_then_beta)
    return exact and ba == Fraction(-1, 2) and ab == 0, {"beta_alpha": str(ba), "alpha_beta": str(ab)}


def c5_dictionary() -> tuple[bool, dict]:
    from .suites import dictionary_suite

    s = dictionary_suite(seed=0, trials=200)
    return s.trials == 200 and not s.failures and s.max_residual < 1e-10, {"max_residual": s.max_residual}


def c6_duality() -> tuple[bool, dict]:
    from .suites import duality_suite

    s = duality_suite(seed=0, trials=100)
    return s.trials == 100 and not s.failures and s.max_residual < 1e-10, {"max_residual": s.max_residual}


def c7_gaussian(samples: int = 10**6, seed: int | None = None) -> tuple[bool, dict]:
    from .gaussian import (
        DEFAULT_SEED,
        GaussianSampler,
        build_kernel,
        chsh_gaussian_setup,
        exact_unitary_spatial_table,
        mc_correlation,
        realize_spatial_strategy_mc,
    )

    seed = DEFAULT_SEED if seed is None else seed
    s = chsh_gaussian_setup(max_length=2)
    worst_se, worst_abs, ok = 0.0, 0.0, True
    for r, v, stream in ((s.rep_a, s.rho, 2), (s.rep_b, s.vartheta, 3)):
        k = build_kernel(r, v, s.words, r.orders)
        sampler = GaussianSampler(k, seed, stream)
        size = len(s.words)
        for g in range(size):
            for h in range(g, size):
                est, se = mc_correlation(sampler, g, h, samples)
                err = abs(est - k.matrix[g, h])
                worst_se = max(worst_se, err / se if se > 0 else (0.0 if err == 0 else np.inf))
                worst_abs = max(worst_abs, err)
                ok &= err <= 4 * se + 1e-12 and err <= 0.02
    exact = exact_unitary_spatial_table(s.rep_a, s.rep_b, s.psi, 2, 2, 2, 2).table
    est, _ = realize_spatial_strategy_mc(
        s.chi, s.rep_a, s.rep_b, s.rho, s.vartheta, s.words, s.words, 2, 2, 2, 2, samples, seed
    )
    table_err = float(np.abs(est.table - exact).max())
    ok &= table_err <= 0.02
    return bool(ok), {"kernel_max_se": worst_se, "kernel_max_abs": worst_abs, "table_error": table_err}


def c8_inclusion() -> tuple[bool, dict]:
    from .suites import inclusion_suite

    s = inclusion_suite(seed=0, trials=100)
    return s.trials == 100 and not s.failures and s.passed, {"failures": len(s.failures), "max_residual": s.max_residual}


CRITERIA = {
    1: ("CHSH classical value 3/4", c1_classical, 1.0),
    2: ("CHSH angular value 13/16", c2_angular, 1.0),
    3: ("CHSH statistical replica", c3_statistical, 1.0),
    4: ("noncommutation witness", c4_noncommutation, None),
    5: ("observation calculus suite", c5_dictionary, 10.0),
    6: ("duality square", c6_duality, 10.0),
    7: ("Gaussian realization", c7_gaussian, 60.0),
    8: ("strategy-space inclusions", c8_inclusion, None),
}


def run_criterion(number: int) -> CriterionResult:
    title, fn, limit = CRITERIA[number]
    t0 = time.perf_counter()
    passed, details = fn()
    return CriterionResult(number, title, bool(passed), time.perf_counter() - t0, limit, details)


def run_all() -> list[CriterionResult]:
    return [run_criterion(k) for k in CRITERIA]
