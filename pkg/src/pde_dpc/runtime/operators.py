import math
import operator
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any


@dataclass
class OpResult:
    """Результат выполнения оператора"""

    ok: bool
    message: str | None = None
    got: Any = None


Operator = Callable[[Any, dict[str, Any]], OpResult]


def _as_number(value: Any) -> float | None:
    if isinstance(value, bool) or not isinstance(value, int | float):
        return None
    number = float(value)
    return None if math.isnan(number) else number


def op_exists(selection: Any, _: dict[str, Any]) -> OpResult:
    """Проверяет что значение существует и не пустое"""
    is_empty = selection is None or (isinstance(selection, list) and len(selection) == 0)
    ok = not is_empty
    return OpResult(ok=ok, message="Selection is empty or None" if not ok else None, got=selection)


def op_equals(selection: Any, params: dict[str, Any]) -> OpResult:
    """Строгое равенство"""
    expected = params["expected"]
    ok = selection == expected
    return OpResult(
        ok=ok,
        message=f"Expected {expected}, got {selection}" if not ok else None,
        got=selection,
    )


def _comparison(symbol: str, compare: Callable[[float, float], bool]) -> Operator:
    def op(selection: Any, params: dict[str, Any]) -> OpResult:
        value = _as_number(selection)
        threshold = _as_number(params.get("expected"))
        if threshold is None:
            return OpResult(False, f"Parameter 'expected' must be a number, got {params.get('expected')!r}", selection)
        if value is None:
            return OpResult(False, f"Selection is not a finite number: {selection!r}", selection)
        ok = compare(value, threshold)
        return OpResult(
            ok=ok,
            message=f"{value:.6g} {symbol} {threshold:.6g} does not hold" if not ok else None,
            got=value,
        )

    op.__name__ = f"op_{compare.__name__}"
    op.__doc__ = f"Numeric comparison: selection {symbol} expected"
    return op


op_le = _comparison("<=", operator.le)
op_lt = _comparison("<", operator.lt)
op_ge = _comparison(">=", operator.ge)
op_gt = _comparison(">", operator.gt)


def op_between(selection: Any, params: dict[str, Any]) -> OpResult:
    """Closed interval check; ``expected`` is ``[low, high]``."""
    bounds = params.get("expected")
    if not isinstance(bounds, list | tuple) or len(bounds) != 2:
        return OpResult(False, f"Parameter 'expected' must be [low, high], got {bounds!r}", selection)
    low, high = (_as_number(b) for b in bounds)
    if low is None or high is None:
        return OpResult(False, f"Bounds must be numbers, got {bounds!r}", selection)
    value = _as_number(selection)
    if value is None:
        return OpResult(False, f"Selection is not a finite number: {selection!r}", selection)
    ok = low <= value <= high
    return OpResult(
        ok=ok,
        message=f"{value:.6g} outside [{low:.6g}, {high:.6g}]" if not ok else None,
        got=value,
    )


# Реестр всех операторов
OPERATORS: dict[str, Operator] = {
    "exists": op_exists,
    "equals": op_equals,
    "le": op_le,
    "lt": op_lt,
    "ge": op_ge,
    "gt": op_gt,
    "between": op_between,
}
