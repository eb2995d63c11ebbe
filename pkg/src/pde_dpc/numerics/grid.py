"""Uniform 1-D grids on [0, 1]."""

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from ..errors import ConfigurationError

if TYPE_CHECKING:
    from ..dsl.models import ExperimentConfig


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid; periodic grids drop the duplicate endpoint x = 1."""

    n_x: int
    dx: float
    periodic: bool = False

    def __post_init__(self) -> None:
        if self.n_x < 2:
            raise ConfigurationError(f"Grid needs at least 2 points, got {self.n_x}")

    @classmethod
    def from_spacing(cls, dx: float, periodic: bool = False) -> "Grid1D":
        cells = round(1.0 / dx)
        if abs(cells * dx - 1.0) > 1e-9:
            raise ConfigurationError(f"dx={dx} does not divide the unit interval")
        return cls(n_x=cells if periodic else cells + 1, dx=1.0 / cells, periodic=periodic)

    @property
    def x(self) -> npt.NDArray[np.float64]:
        return np.arange(self.n_x, dtype=np.float64) * self.dx


def build_grid(experiment: "ExperimentConfig") -> Grid1D:
    return Grid1D.from_spacing(experiment.grid.dx, periodic=experiment.periodic)
