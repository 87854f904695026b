"""Shared numerical tolerances."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    structural: float = 1e-9  # probability-table invariants
    exact: float = 1e-12  # comparisons that should hold to rounding
    operator: float = 1e-10  # projection / unitarity checks
    commutator: float = 1e-8  # gate for quantum commuting evaluation
    row_sum_error: float = 1e-6  # hard error threshold for raw tables
    eigen_cutoff: float = 1e-10  # pseudo-square-root eigenvalue floor

    def with_overrides(self, **kw: float) -> "Tolerances":
        return replace(self, **kw)


DEFAULT_TOL = Tolerances()
