"""Grids, random fields, actuator bases and finite-difference solvers."""

from .basis import assemble_control_field, basis_matrix, generate_training_amplitudes, hold_amplitudes
from .grf import cholesky_factor, rbf_kernel_matrix, sample_grf, sample_grf_batch
from .grid import Grid1D, build_grid
from .seeding import derive_seed, make_rng
from .solvers import (
    STEPPERS,
    Stepper,
    advance,
    burgers_step,
    fisher_kpp_newton,
    fisher_kpp_step,
    heat_step,
    neumann_laplacian,
    rollout_fdm,
)
from .trajectory import Trajectory
from .tridiagonal import solve_tridiagonal
from .types import Array, ControlAmplitudes, Field

__all__ = [
    "STEPPERS",
    "Array",
    "ControlAmplitudes",
    "Field",
    "Grid1D",
    "Stepper",
    "Trajectory",
    "advance",
    "assemble_control_field",
    "basis_matrix",
    "build_grid",
    "burgers_step",
    "cholesky_factor",
    "derive_seed",
    "fisher_kpp_newton",
    "fisher_kpp_step",
    "generate_training_amplitudes",
    "heat_step",
    "hold_amplitudes",
    "make_rng",
    "neumann_laplacian",
    "rbf_kernel_matrix",
    "rollout_fdm",
    "sample_grf",
    "sample_grf_batch",
    "solve_tridiagonal",
]
