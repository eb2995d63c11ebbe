"""Time-indexed (field, amplitude) sequences shared by solvers, datasets and evaluation."""

import dataclasses
from dataclasses import dataclass

import numpy as np

from ..dsl.models import GRFConfig, PDEParams
from ..errors import ShapeError
from .types import Array


@dataclass(frozen=True)
class Trajectory:
    """Fields u_0..u_N with the amplitudes a_0..a_{N−1} that drove them.

    Attributes:
        fields: Array of shape (N + 1, n_x)
        amplitudes: Array of shape (N, n_actuators)
        dt: Time between consecutive fields
        pde: Physical parameters of the producing solver, if any
        seed: Seed the trajectory was generated from, if any
        grf: Random field the initial condition was drawn from, if any
    """

    fields: Array
    amplitudes: Array
    dt: float
    pde: PDEParams | None = None
    seed: int | None = None
    grf: GRFConfig | None = None

    def __post_init__(self) -> None:
        if self.fields.ndim != 2 or self.amplitudes.ndim != 2:
            raise ShapeError(
                f"Trajectory expects 2-D fields and amplitudes, got "
                f"{self.fields.shape} and {self.amplitudes.shape}"
            )
        if self.fields.shape[0] != self.amplitudes.shape[0] + 1:
            raise ShapeError(
                f"{self.fields.shape[0]} fields need {self.fields.shape[0] - 1} amplitude rows, "
                f"got {self.amplitudes.shape[0]}"
            )

    @property
    def n_steps(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def initial(self) -> Array:
        return self.fields[0]

    @property
    def terminal(self) -> Array:
        return self.fields[-1]

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.fields)))

    def with_metadata(self, seed: int | None, grf: GRFConfig | None) -> "Trajectory":
        return dataclasses.replace(self, seed=seed, grf=grf)
