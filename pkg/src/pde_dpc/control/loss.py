"""Penalty-based DPC objective over a differentiable rollout."""

import functools

import numpy as np

from ..autodiff import Tensor, matmul, reduce_sum, relu, square
from ..dsl.models import AffineConstraint, DPCLossConfig
from ..numerics.grid import Grid1D
from ..numerics.types import Array
from .policy import ScenarioParams
from .rollout import DifferentiableRollout


@functools.lru_cache(maxsize=16)
def second_difference_matrix(grid: Grid1D) -> Array:
    """Central second difference / Δx²; wraps on periodic grids, zero rows at walls otherwise."""
    n = grid.n_x
    d2 = np.zeros((n, n))
    rows = np.arange(n) if grid.periodic else np.arange(1, n - 1)
    d2[rows, rows] = -2.0
    d2[rows, (rows - 1) % n] += 1.0
    d2[rows, (rows + 1) % n] += 1.0
    d2 /= grid.dx**2
    d2.setflags(write=False)
    return d2


def curvature_density(u: Array, grid: Grid1D) -> Array:
    """∫(∂²u/∂x²)² dx by the rectangle rule, over the last axis."""
    curvature = np.asarray(u) @ second_difference_matrix(grid).T
    return np.sum(curvature * curvature, axis=-1) * grid.dx


def _penalty(values: Tensor, constraint: AffineConstraint) -> Tensor:
    violation = relu(values * constraint.coefficient - constraint.threshold)
    return reduce_sum(square(violation))


def dpc_loss(
    rollout: DifferentiableRollout,
    scen: ScenarioParams,
    cfg: DPCLossConfig,
    grid: Grid1D,
) -> Tensor:
    """Scalar DPC loss averaged over the batch and normalized by N·n_x.

    Per scenario:
        Q_ℓ·Σ_k ℓ(u_k)·dt_op over k = 1..N (curvature cost),
        + control_weight·Σ_k Σ_i a_k,i²·dt_op over k = 0..N−1,
        + Q_h·Σ ReLU(h(u_k))² + Q_g·Σ ReLU(g(a_k))²,
        + Q_N·‖u_N − target‖²·Δx (terminal tracking).
    """
    m = rollout.batch_size
    n_steps = rollout.n_steps
    dt = rollout.dt_op
    terms: list[Tensor] = []

    if cfg.cost == "curvature_integral":
        d2t = Tensor(second_difference_matrix(grid).T)
        for u in rollout.states[1:]:
            c = matmul(u, d2t)
            terms.append(reduce_sum(square(c)) * (cfg.stage_weight * grid.dx * dt))

    if cfg.control_weight > 0.0:
        for a in rollout.amplitudes:
            terms.append(reduce_sum(square(a)) * (cfg.control_weight * dt))

    for constraint in cfg.state_constraints:
        for u in rollout.states[1:]:
            terms.append(_penalty(u, constraint) * cfg.state_penalty_weight)
    for constraint in cfg.control_constraints:
        for a in rollout.amplitudes:
            terms.append(_penalty(a, constraint) * cfg.control_penalty_weight)

    if cfg.cost == "terminal_tracking":
        if scen.target is None:
            raise ValueError("terminal_tracking cost needs scenario targets")
        target = np.broadcast_to(scen.target, rollout.states[-1].shape)
        error = rollout.states[-1] - np.ascontiguousarray(target)
        terms.append(reduce_sum(square(error)) * (cfg.terminal_weight * grid.dx))

    if not terms:
        return Tensor(np.zeros(()))
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    return total * (1.0 / (m * max(n_steps, 1) * grid.n_x))
