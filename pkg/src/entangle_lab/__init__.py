"""Statistical and ergodic replicas of quantum strategies for nonlocal games."""
from .config import DEFAULT_TOL, Tolerances
from .games import (
    BareStrategy,
    DualCorrelationTable,
    GameValue,
    NonlocalGame,
    chsh_game,
    classical_value_bruteforce,
    dual_game_value,
    evaluate_game,
    fourier_transform_2d,
    inverse_fourier_transform_2d,
)
from .observables import (
    FiniteSampleSpace,
    Observable,
    check_consistency,
    eval_statistical_commuting,
    eval_statistical_spatial,
    observation_apply,
)
from .quantum import (
    ProjectionValuedMeasure,
    Wavefunction,
    eval_quantum_commuting,
    eval_quantum_spatial,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "Tolerances",
    "BareStrategy",
    "DualCorrelationTable",
    "GameValue",
    "NonlocalGame",
    "chsh_game",
    "classical_value_bruteforce",
    "dual_game_value",
    "evaluate_game",
    "fourier_transform_2d",
    "inverse_fourier_transform_2d",
    "FiniteSampleSpace",
    "Observable",
    "check_consistency",
    "eval_statistical_commuting",
    "eval_statistical_spatial",
    "observation_apply",
    "ProjectionValuedMeasure",
    "Wavefunction",
    "eval_quantum_commuting",
    "eval_quantum_spatial",
]
