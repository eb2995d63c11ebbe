"""Central finite-difference oracle for reverse-mode gradients."""

from collections.abc import Callable, Sequence

import numpy as np

from .tensor import Array, Tape, Tensor


def numerical_gradient(
    loss_fn: Callable[[], Tensor], param: Tensor, step: float = 1e-5
) -> Array:
    """Central differences of a scalar ``loss_fn`` with respect to ``param.data``."""
    grad = np.zeros_like(param.data)
    flat = param.data.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + step
        plus = loss_fn().item()
        flat[i] = original - step
        minus = loss_fn().item()
        flat[i] = original
        out[i] = (plus - minus) / (2.0 * step)
    return grad


def analytic_gradients(loss_fn: Callable[[], Tensor], params: Sequence[Tensor]) -> list[Array]:
    for p in params:
        p.zero_grad()
    with Tape() as tape:
        loss = loss_fn()
        tape.backward(loss)
    return [p.grad if p.grad is not None else np.zeros_like(p.data) for p in params]


def max_relative_error(analytic: Array, numeric: Array, floor: float = 1e-12) -> float:
    """Max-norm relative error ‖a − n‖∞ / max(‖a‖∞, ‖n‖∞)."""
    if analytic.size == 0:
        return 0.0
    scale = max(float(np.max(np.abs(analytic))), float(np.max(np.abs(numeric))), floor)
    return float(np.max(np.abs(analytic - numeric))) / scale


def check_gradients(
    loss_fn: Callable[[], Tensor], params: Sequence[Tensor], step: float = 1e-5
) -> float:
    """Worst relative error between reverse-mode and finite-difference gradients."""
    analytic = analytic_gradients(loss_fn, params)
    worst = 0.0
    for p, a in zip(params, analytic, strict=True):
        worst = max(worst, max_relative_error(a, numerical_gradient(loss_fn, p, step)))
    return worst
