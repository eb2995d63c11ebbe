"""Thomas algorithm for tridiagonal systems, vectorized over trailing axes."""

import numpy as np

from ..errors import ShapeError, SingularSystemError
from .types import Array

_TINY = np.finfo(np.float64).tiny


def solve_tridiagonal(lower: Array, diag: Array, upper: Array, rhs: Array) -> Array:
    """Solve A·x = rhs for tridiagonal A.

    The system index is the leading axis of every argument: ``diag`` and
    ``rhs`` have length n, ``lower`` (sub-diagonal) and ``upper``
    (super-diagonal) length n − 1. Any trailing axes broadcast, so one call
    solves a whole batch of independent systems.

    Raises:
        ShapeError: Leading lengths are inconsistent.
        SingularSystemError: A pivot vanished during elimination.
    """
    lower, diag, upper, rhs = (np.asarray(a, dtype=np.float64) for a in (lower, diag, upper, rhs))
    n = diag.shape[0]
    if rhs.shape[0] != n or lower.shape[0] != n - 1 or upper.shape[0] != n - 1:
        raise ShapeError(
            f"tridiagonal: diag {diag.shape}, lower {lower.shape}, upper {upper.shape} "
            f"and rhs {rhs.shape} do not describe one system"
        )
    trailing = np.broadcast_shapes(lower.shape[1:], diag.shape[1:], upper.shape[1:], rhs.shape[1:])
    lower, diag, upper, rhs = (_expand(a, trailing) for a in (lower, diag, upper, rhs))

    c = np.empty((max(n - 1, 0), *trailing))
    d = np.empty((n, *trailing))

    pivot = diag[0]
    _check_pivot(pivot, 0)
    if n > 1:
        c[0] = upper[0] / pivot
    d[0] = rhs[0] / pivot
    for i in range(1, n):
        pivot = diag[i] - lower[i - 1] * c[i - 1]
        _check_pivot(pivot, i)
        if i < n - 1:
            c[i] = upper[i] / pivot
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot

    x = d
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _check_pivot(pivot: Array, row: int) -> None:
    if np.any(np.abs(pivot) < _TINY):
        raise SingularSystemError(f"zero pivot in tridiagonal solve at row {row}")


def _expand(a: Array, trailing: tuple[int, ...]) -> Array:
    padded = a.reshape(a.shape + (1,) * (1 + len(trailing) - a.ndim))
    return np.broadcast_to(padded, (a.shape[0], *trailing))
