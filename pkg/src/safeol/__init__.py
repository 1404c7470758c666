"""Safe online learning with an unknown constraint learned from noisy feedback."""
from .config import ExperimentConfig, dump_config, load_config
from .engine import RunResult, hindsight_best_safe, run_long_term, run_safe_learning, simulate
from .environments import PRESETS, Environment, make_environment
from .errors import (
    ActionNotOptimistic,
    BoundViolated,
    ConfigError,
    EmptyCandidatePool,
    EmptyPessimisticSet,
    GradientTooLarge,
    MissingHindsight,
    ModelMismatch,
    NoAwakeAction,
    NoSafeAction,
    SafeOLError,
    SearchBudgetExceeded,
)
from .records import RegretLedger, RoundRecord

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig", "load_config", "dump_config",
    "RunResult", "simulate", "run_safe_learning", "run_long_term", "hindsight_best_safe",
    "PRESETS", "Environment", "make_environment",
    "RegretLedger", "RoundRecord",
    "SafeOLError", "ConfigError", "EmptyPessimisticSet", "ModelMismatch", "NoSafeAction",
    "ActionNotOptimistic", "EmptyCandidatePool", "GradientTooLarge", "NoAwakeAction",
    "SearchBudgetExceeded", "BoundViolated", "MissingHindsight",
]
