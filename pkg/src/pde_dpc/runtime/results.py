"""
Per-item result capture for batch work that must survive individual failures.
"""

import functools
import inspect
import logging
import time
from collections.abc import Callable
from dataclasses import dataclass

from ..errors import (
    ConvergenceError,
    DivergenceError,
    SingularSystemError,
    SolverError,
    StabilityError,
)

logger = logging.getLogger(__name__)

SOLVER_ERROR_TYPES: dict[type[SolverError], str] = {
    SingularSystemError: "singular",
    StabilityError: "stability",
    ConvergenceError: "convergence",
    DivergenceError: "divergence",
}


@dataclass
class Result[T]:
    """
    Generic result type for one unit of batch work (a sample, a scenario).

    Attributes:
        success: Whether the operation was successful
        value: The successful result value (if success=True)
        error: Error message (if success=False)
        error_type: Classification of the error (if success=False)
            Common types: "singular", "stability", "convergence", "divergence",
            "unexpected"
        step: Failing time-step index, when the error carried one
    """

    success: bool
    value: T | None = None
    error: str | None = None
    error_type: str | None = None
    step: int | None = None

    @classmethod
    def ok(cls, value: T) -> "Result[T]":
        """Create a successful result."""
        return cls(success=True, value=value)

    @classmethod
    def fail(cls, error_type: str, message: str, step: int | None = None) -> "Result[T]":
        """
        Create an error result.

        Args:
            error_type: One of the solver classes above (or custom)
            message: Human-readable error description
            step: Failing time-step index, if known
        """
        return cls(success=False, error=message, error_type=error_type, step=step)


def _work_label(func: Callable[..., object], args: tuple[object, ...], kwargs: dict[str, object]) -> str:
    sig = inspect.signature(func)
    bound = sig.bind(*args, **kwargs)
    bound.apply_defaults()
    index = bound.arguments.get("index")
    return f"{func.__name__}[{index}]" if index is not None else func.__name__


def with_solver_error_handling[**P, R](
    func: Callable[P, Result[R]],
) -> Callable[P, Result[R]]:
    """Decorator to convert solver exceptions into classified failed Results."""

    @functools.wraps(func)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> Result[R]:
        label = _work_label(func, args, kwargs)
        try:
            return func(*args, **kwargs)
        except SolverError as e:
            error_type = next(
                (name for cls, name in SOLVER_ERROR_TYPES.items() if isinstance(e, cls)),
                "unexpected",
            )
            logger.error(f"{label} failed: {error_type}", exc_info=True)
            return Result.fail(error_type, str(e), step=e.step)
        except Exception as e:
            logger.error(f"{label} failed unexpectedly", exc_info=True)
            return Result.fail("unexpected", f"Unexpected error: {str(e)}")

    return wrapper


def with_timing_logging[**P, R](
    func: Callable[P, Result[R]],
) -> Callable[P, Result[R]]:
    """Decorator to log latency and outcome of a unit of batch work."""

    @functools.wraps(func)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> Result[R]:
        label = _work_label(func, args, kwargs)

        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        latency_ms = int((time.perf_counter() - start_time) * 1000)

        logger.debug(
            f"{label} completed",
            extra={
                "work": {
                    "function": func.__name__,
                    "label": label,
                    "latency_ms": latency_ms,
                    "success": result.success,
                    "error_type": result.error_type,
                }
            },
        )
        return result

    return wrapper
