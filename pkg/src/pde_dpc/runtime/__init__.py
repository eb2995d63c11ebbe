"""Runtime layer: settings, worker pool, error capture and acceptance checks.

Evaluation, report and figure modules import the model packages and are
imported by path (``pde_dpc.runtime.evaluation``) to keep this package light.
"""

from .config import RuntimeSettings, load_runtime_settings
from .engine import Engine, RuleOutcome, failed_rules
from .operators import OPERATORS, OpResult
from .pool import map_in_threads, run_pool
from .query import eval_path
from .results import Result, with_solver_error_handling, with_timing_logging

__all__ = [
    "Engine",
    "OPERATORS",
    "OpResult",
    "Result",
    "RuleOutcome",
    "RuntimeSettings",
    "eval_path",
    "failed_rules",
    "load_runtime_settings",
    "map_in_threads",
    "run_pool",
    "with_solver_error_handling",
    "with_timing_logging",
]
