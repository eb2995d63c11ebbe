"""Finite-difference time steppers for the heat, Burgers and Fisher-KPP equations.

Every stepper maps (u, f) at t_k to u at t_{k+1} on a fixed grid. Fields may
carry leading batch axes; the grid is always the last axis.
"""

import logging
from collections.abc import Callable

import numpy as np

from ..dsl.models import ControlBasisConfig, GRFConfig, PDEKind, PDEParams
from ..errors import ConvergenceError, DivergenceError, ShapeError, SolverError, StabilityError
from .basis import assemble_control_field
from .grid import Grid1D
from .trajectory import Trajectory
from .tridiagonal import solve_tridiagonal
from .types import ControlAmplitudes, Field

logger = logging.getLogger(__name__)

Stepper = Callable[[Field, Field, PDEParams, Grid1D], Field]


def _require(p: PDEParams, kind: PDEKind) -> None:
    if p.kind != kind:
        raise ValueError(f"{kind.value} stepper called with kind={p.kind.value}")


def heat_step(u: Field, f: Field, p: PDEParams, grid: Grid1D) -> Field:
    """Crank–Nicolson step of u_t = αu_xx + f with u(0) = u(1) = 0.

    The forcing is taken explicitly at the start of the step.
    """
    _require(p, PDEKind.HEAT)
    lam = p.alpha * p.dt / grid.dx**2
    n = grid.n_x

    rhs = np.zeros_like(u)
    rhs[..., 1:-1] = (
        u[..., 1:-1]
        + 0.5 * lam * (u[..., :-2] - 2.0 * u[..., 1:-1] + u[..., 2:])
        + p.dt * f[..., 1:-1]
    )

    diag = np.full(n, 1.0 + lam)
    diag[0] = diag[-1] = 1.0
    lower = np.full(n - 1, -0.5 * lam)
    lower[-1] = 0.0
    upper = np.full(n - 1, -0.5 * lam)
    upper[0] = 0.0
    return solve_tridiagonal(lower, diag, upper, rhs.T).T


def burgers_step(u: Field, f: Field, p: PDEParams, grid: Grid1D) -> Field:
    """Explicit first-order upwind step of u_t + u·u_x = f on a periodic grid.

    With ``p.conservative`` the update uses the Godunov flux of u²/2 instead
    of the sign-selected advective stencil.

    Raises:
        StabilityError: max|u|·Δt/Δx exceeds 1.
    """
    _require(p, PDEKind.BURGERS)
    ratio = p.dt / grid.dx
    peak = float(np.max(np.abs(u))) if u.size else 0.0
    if peak * ratio > 1.0:
        raise StabilityError(
            f"CFL violated: max|u|={peak:.6g} gives max|u|·dt/dx={peak * ratio:.6g} > 1"
        )

    left = np.roll(u, 1, axis=-1)
    if p.conservative:
        flux = _godunov_flux(left, u)  # flux through the face i − 1/2
        return u - ratio * (np.roll(flux, -1, axis=-1) - flux) + p.dt * f

    right = np.roll(u, -1, axis=-1)
    gradient = np.where(u >= 0.0, u - left, right - u)
    return u - ratio * u * gradient + p.dt * f


def _godunov_flux(u_left: Field, u_right: Field) -> Field:
    fl = 0.5 * u_left * u_left
    fr = 0.5 * u_right * u_right
    rarefaction = np.where(u_left > 0.0, fl, np.where(u_right < 0.0, fr, 0.0))
    return np.where(u_left <= u_right, rarefaction, np.maximum(fl, fr))


def neumann_laplacian(v: Field, dx: float) -> Field:
    """Second difference with mirrored ghost points (zero-flux boundaries)."""
    lap = np.empty_like(v)
    lap[..., 1:-1] = v[..., :-2] - 2.0 * v[..., 1:-1] + v[..., 2:]
    lap[..., 0] = 2.0 * (v[..., 1] - v[..., 0])
    lap[..., -1] = 2.0 * (v[..., -2] - v[..., -1])
    return lap / (dx * dx)


def fisher_kpp_newton(
    u: Field, f: Field, p: PDEParams, grid: Grid1D
) -> tuple[Field, list[float]]:
    """Backward-Euler step of u_t = αu_xx + ru(1−u) − f solved by Newton iteration.

    Returns the new field and the max-norm residual before every update.

    Raises:
        ConvergenceError: Residual still above ``p.newton_tol`` after
            ``p.newton_max_iter`` updates.
    """
    _require(p, PDEKind.FISHER_KPP)
    k = p.alpha * p.dt / grid.dx**2
    n = grid.n_x
    lower = np.full(n - 1, -k)
    lower[-1] = -2.0 * k
    upper = np.full(n - 1, -k)
    upper[0] = -2.0 * k

    v = np.array(u, dtype=np.float64, copy=True)
    history: list[float] = []
    for iteration in range(p.newton_max_iter + 1):
        residual = v - p.dt * (p.alpha * neumann_laplacian(v, grid.dx) + p.r * v * (1.0 - v) - f) - u
        norm = float(np.max(np.abs(residual))) if residual.size else 0.0
        history.append(norm)
        if norm < p.newton_tol:
            return v, history
        if iteration == p.newton_max_iter:
            break
        diag = 1.0 + 2.0 * k - p.dt * p.r * (1.0 - 2.0 * v)
        v = v - solve_tridiagonal(lower, diag.T, upper, residual.T).T

    raise ConvergenceError(
        f"Newton did not converge: residual {history[-1]:.3e} after {p.newton_max_iter} iterations"
    )


def fisher_kpp_step(u: Field, f: Field, p: PDEParams, grid: Grid1D) -> Field:
    v, history = fisher_kpp_newton(u, f, p, grid)
    logger.debug("Newton converged", extra={"newton": {"iterations": len(history) - 1}})
    return v


STEPPERS: dict[PDEKind, Stepper] = {
    PDEKind.HEAT: heat_step,
    PDEKind.BURGERS: burgers_step,
    PDEKind.FISHER_KPP: fisher_kpp_step,
}


def advance(u: Field, f: Field, p: PDEParams, grid: Grid1D) -> Field:
    """One solver step of the configured PDE, rejecting non-finite output."""
    out = STEPPERS[p.kind](u, f, p, grid)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(f"{p.kind.value} step produced non-finite values")
    return out


def rollout_fdm(
    u0: Field,
    amplitudes: ControlAmplitudes,
    p: PDEParams,
    basis: ControlBasisConfig,
    grid: Grid1D,
    *,
    seed: int | None = None,
    grf: GRFConfig | None = None,
) -> Trajectory:
    """Roll the solver forward once per amplitude row (one row per solver step).

    Raises:
        ShapeError: ``u0`` or ``amplitudes`` do not match the grid or basis.
        SolverError: A step failed; the message and ``step`` name the failing index.
    """
    u0 = np.asarray(u0, dtype=np.float64)
    amps = np.asarray(amplitudes, dtype=np.float64)
    if amps.size == 0:
        amps = amps.reshape(0, basis.n_actuators)
    if amps.ndim != 2 or amps.shape[1] != basis.n_actuators:
        raise ShapeError(f"Expected amplitudes of shape (N, {basis.n_actuators}), got {amps.shape}")
    if u0.shape != (grid.n_x,):
        raise ShapeError(f"Initial field must have shape ({grid.n_x},), got {u0.shape}")

    fields = np.empty((amps.shape[0] + 1, grid.n_x))
    fields[0] = u0
    for k in range(amps.shape[0]):
        forcing = assemble_control_field(amps[k], basis, grid)
        try:
            fields[k + 1] = advance(fields[k], forcing, p, grid)
        except SolverError as exc:
            raise exc.at_step(k) from exc
    return Trajectory(fields=fields, amplitudes=amps, pde=p, dt=p.dt, seed=seed, grf=grf)
