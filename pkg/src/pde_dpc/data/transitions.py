"""Supervision pairs cut from solver trajectories at the operator time step."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import DatasetError, ShapeError
from ..numerics.trajectory import Trajectory
from ..numerics.types import Array


@dataclass(frozen=True)
class TransitionBatch:
    """One-step pairs u_now --(amps held for dt_op)--> u_next."""

    u_now: Array
    amps: Array
    u_next: Array
    dt_op: float

    def __post_init__(self) -> None:
        sizes = {self.u_now.shape[0], self.amps.shape[0], self.u_next.shape[0]}
        if len(sizes) != 1:
            raise ShapeError(
                f"Transition batches disagree: u_now {self.u_now.shape}, "
                f"amps {self.amps.shape}, u_next {self.u_next.shape}"
            )

    def __len__(self) -> int:
        return self.u_now.shape[0]

    @classmethod
    def concat(cls, batches: Sequence["TransitionBatch"]) -> "TransitionBatch":
        if not batches:
            raise DatasetError("No transitions to concatenate")
        if len({b.dt_op for b in batches}) != 1:
            raise DatasetError("Cannot concatenate transitions with different dt_op")
        return cls(
            u_now=np.concatenate([b.u_now for b in batches]),
            amps=np.concatenate([b.amps for b in batches]),
            u_next=np.concatenate([b.u_next for b in batches]),
            dt_op=batches[0].dt_op,
        )


@dataclass(frozen=True)
class RolloutWindows:
    """Multi-step supervision: u0 then ``steps`` targets under per-step amplitudes.

    Shapes: u0 (B, n_x), amps (B, steps, n), targets (B, steps, n_x).
    """

    u0: Array
    amps: Array
    targets: Array
    dt_op: float

    def __len__(self) -> int:
        return self.u0.shape[0]

    @property
    def steps(self) -> int:
        return self.amps.shape[1]

    def take(self, idx: Array) -> "RolloutWindows":
        return RolloutWindows(self.u0[idx], self.amps[idx], self.targets[idx], self.dt_op)


def _check_stride(traj: Trajectory, stride: int) -> None:
    if stride < 1:
        raise DatasetError(f"stride must be >= 1, got {stride}")
    if stride > traj.n_steps:
        raise DatasetError(f"stride {stride} exceeds trajectory length {traj.n_steps}")
    if traj.n_steps % stride != 0:
        raise DatasetError(f"stride {stride} does not divide {traj.n_steps} steps")
    held = traj.amplitudes.reshape(traj.n_steps // stride, stride, -1)
    if not np.all(held == held[:, :1, :]):
        raise DatasetError(f"amplitudes are not held constant over windows of {stride} steps")


def coarsen(traj: Trajectory, stride: int) -> Trajectory:
    """Subsample a zero-order-held trajectory to one entry per control step."""
    _check_stride(traj, stride)
    return Trajectory(
        fields=traj.fields[::stride].copy(),
        amplitudes=traj.amplitudes[::stride].copy(),
        pde=traj.pde,
        dt=traj.dt * stride,
        seed=traj.seed,
        grf=traj.grf,
    )


def to_transitions(traj: Trajectory, stride: int) -> TransitionBatch:
    """Non-overlapping windows (fields[k], amps[k], fields[k + stride]), k = 0, stride, ..."""
    coarse = coarsen(traj, stride)
    return TransitionBatch(
        u_now=coarse.fields[:-1],
        amps=coarse.amplitudes,
        u_next=coarse.fields[1:],
        dt_op=coarse.dt,
    )


def to_windows(traj: Trajectory, stride: int, steps: int) -> RolloutWindows:
    """Every start index of the coarse trajectory with ``steps`` successors."""
    coarse = coarsen(traj, stride)
    n = coarse.n_steps
    if not 1 <= steps <= n:
        raise DatasetError(f"window of {steps} steps does not fit {n} operator steps")
    starts = np.arange(n - steps + 1)
    offsets = np.arange(steps)
    return RolloutWindows(
        u0=coarse.fields[starts],
        amps=coarse.amplitudes[starts[:, None] + offsets[None, :]],
        targets=coarse.fields[starts[:, None] + offsets[None, :] + 1],
        dt_op=coarse.dt,
    )
