"""Classical RK4 stepping of a learned (or oracle) right-hand side."""

from collections.abc import Callable

import numpy as np

from ..autodiff import Tensor, all_finite
from ..errors import DivergenceError, ShapeError, SolverError, UndefinedMetricError
from ..numerics.trajectory import Trajectory
from ..numerics.types import Array, ControlAmplitudes, Field

RightHandSide = Callable[[Tensor, Tensor], Tensor]


def rk4_step(rhs: RightHandSide, u: Tensor | Array, amps: Tensor | Array, dt_op: float) -> Tensor:
    """One four-stage step with ``amps`` held across the stages.

    Raises:
        DivergenceError: A stage or the update is non-finite.
    """
    if dt_op <= 0.0:
        raise ValueError(f"dt_op must be positive, got {dt_op}")
    u = u if isinstance(u, Tensor) else Tensor(u)
    amps = amps if isinstance(amps, Tensor) else Tensor(amps)
    half = 0.5 * dt_op

    k1 = _stage(rhs(u, amps), 1)
    k2 = _stage(rhs(u + k1 * half, amps), 2)
    k3 = _stage(rhs(u + k2 * half, amps), 3)
    k4 = _stage(rhs(u + k3 * dt_op, amps), 4)
    out = u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt_op / 6.0)
    if not all_finite(out):
        raise DivergenceError("non-finite state after RK4 update")
    return out


def _stage(k: Tensor, index: int) -> Tensor:
    if not all_finite(k):
        raise DivergenceError(f"non-finite value in RK4 stage {index}")
    return k


def rollout_states(
    rhs: RightHandSide, u0: Array, amps: Array, dt_op: float
) -> Array:
    """Autoregressive rollout without a tape.

    ``u0`` is (n_x,) or (B, n_x); ``amps`` is (N, n) or (B, N, n). Returns
    states of shape (N + 1, n_x) or (B, N + 1, n_x).

    Raises:
        DivergenceError: Annotated with the failing step.
    """
    u0 = np.asarray(u0, dtype=np.float64)
    amps = np.asarray(amps, dtype=np.float64)
    batched = u0.ndim == 2
    if amps.ndim != u0.ndim + 1:
        raise ShapeError(f"Amplitudes {amps.shape} do not match initial states {u0.shape}")
    n_steps = amps.shape[-2]
    states = [u0]
    u = Tensor(u0)
    for k in range(n_steps):
        a_k = amps[:, k, :] if batched else amps[k]
        try:
            u = rk4_step(rhs, u, a_k, dt_op)
        except SolverError as exc:
            raise exc.at_step(k) from exc
        states.append(u.data)
    return np.stack(states, axis=1 if batched else 0)


def operator_rollout(
    model: RightHandSide, u0: Field, amps: ControlAmplitudes, dt_op: float
) -> Trajectory:
    """Surrogate trajectory of len(amps) + 1 fields at the operator step."""
    u0 = np.asarray(u0, dtype=np.float64)
    amps = np.asarray(amps, dtype=np.float64)
    if amps.size == 0:
        amps = amps.reshape(0, getattr(model, "n_actuators", 0))
    fields = rollout_states(model, u0, amps, dt_op)
    return Trajectory(fields=fields, amplitudes=amps, dt=dt_op)


def relative_l2(pred: Trajectory | Array, truth: Trajectory | Array) -> float:
    """‖pred − truth‖₂ / ‖truth‖₂ over the whole space-time tensor."""
    p = pred.fields if isinstance(pred, Trajectory) else np.asarray(pred, dtype=np.float64)
    t = truth.fields if isinstance(truth, Trajectory) else np.asarray(truth, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeError(f"relative_l2: shapes differ, {p.shape} vs {t.shape}")
    reference = float(np.linalg.norm(t))
    if reference == 0.0:
        raise UndefinedMetricError("relative L2 error is undefined for an all-zero reference")
    return float(np.linalg.norm(p - t)) / reference
