"""Tests for the finite-difference steppers and solver rollouts."""

from pathlib import Path

import numpy as np
import pytest
from pytest_mock import MockerFixture

from pde_dpc.dsl import load_experiment
from pde_dpc.dsl.models import ControlBasisConfig, GRFConfig, PDEKind, PDEParams
from pde_dpc.errors import ConvergenceError, DivergenceError, ShapeError, SolverError, StabilityError
from pde_dpc.numerics import (
    STEPPERS,
    Grid1D,
    advance,
    build_grid,
    burgers_step,
    fisher_kpp_newton,
    fisher_kpp_step,
    generate_training_amplitudes,
    heat_step,
    neumann_laplacian,
    rollout_fdm,
    sample_grf_batch,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _heat(dt: float, T: float = 0.1) -> PDEParams:
    return PDEParams(kind="heat", bc="dirichlet0", alpha=0.1, dt=dt, T=T)


def _burgers(dt: float, conservative: bool = False) -> PDEParams:
    return PDEParams(kind="burgers", bc="periodic", dt=dt, T=1.0, conservative=conservative)


def _fisher(dt: float = 0.01, **kwargs: float) -> PDEParams:
    return PDEParams(kind="fisher_kpp", bc="neumann0", alpha=0.01, r=1.0, dt=dt, T=1.0, **kwargs)


def _heat_error(dx: float, dt: float) -> float:
    grid = Grid1D.from_spacing(dx)
    p = _heat(dt)
    u = np.sin(np.pi * grid.x)
    f = np.zeros_like(u)
    for _ in range(p.n_steps):
        u = heat_step(u, f, p, grid)
    exact = np.exp(-p.alpha * np.pi**2 * p.T) * np.sin(np.pi * grid.x)
    return float(np.max(np.abs(u - exact)))


def test_heat_matches_decaying_sine() -> None:
    """Test Crank–Nicolson against the analytic sin(πx) decay at the defaults."""
    assert _heat_error(0.01, 0.001) < 1e-3


def test_heat_converges_at_second_order() -> None:
    """Test halving dx and dt together cuts the error by close to four."""
    coarse = _heat_error(0.01, 0.001)
    fine = _heat_error(0.005, 0.0005)
    assert coarse / fine >= 3.5


def test_heat_zero_is_an_equilibrium() -> None:
    """Test u ≡ 0 stays exactly zero across random coefficients and grids."""
    rng = np.random.default_rng(7)
    for _ in range(1000):
        dt = float(rng.choice([1e-4, 1e-3, 1e-2, 0.05]))
        alpha = float(rng.uniform(1e-3, 1.0))
        p = PDEParams(kind="heat", bc="dirichlet0", alpha=alpha, dt=dt, T=3 * dt)
        grid = Grid1D.from_spacing(float(rng.choice([0.005, 0.01, 0.02, 0.05, 0.1])))
        u = np.zeros(grid.n_x)
        for _ in range(p.n_steps):
            u = heat_step(u, np.zeros(grid.n_x), p, grid)
        assert np.all(u == 0.0)


def test_heat_boundaries_stay_pinned() -> None:
    """Test forcing never moves the Dirichlet endpoints."""
    grid = Grid1D.from_spacing(0.1)
    out = heat_step(np.zeros(grid.n_x), np.ones(grid.n_x), _heat(0.01), grid)
    assert out[0] == 0.0
    assert out[-1] == 0.0
    assert np.all(out[1:-1] > 0.0)


def test_heat_step_batches() -> None:
    """Test a batch of fields advances row by row."""
    grid = Grid1D.from_spacing(0.1)
    rng = np.random.default_rng(0)
    u = rng.normal(size=(3, grid.n_x))
    f = rng.normal(size=(3, grid.n_x))
    batched = heat_step(u, f, _heat(0.01), grid)
    for row in range(3):
        np.testing.assert_allclose(batched[row], heat_step(u[row], f[row], _heat(0.01), grid))


def test_stepper_rejects_other_kind() -> None:
    """Test a stepper refuses parameters of another equation."""
    grid = Grid1D.from_spacing(0.1, periodic=True)
    with pytest.raises(ValueError, match="heat stepper"):
        heat_step(np.zeros(grid.n_x), np.zeros(grid.n_x), _burgers(0.01), grid)


@pytest.mark.parametrize("conservative", [False, True])
def test_burgers_is_monotone(conservative: bool) -> None:
    """Test unforced steps create no new extrema in 1000 mixed-sign fields under CFL."""
    grid = Grid1D.from_spacing(0.02, periodic=True)
    p = _burgers(0.01, conservative)
    grf = GRFConfig(length_scale=0.2, variance=1.0, periodic_projection=True)
    u = sample_grf_batch(grf, grid, 5, 1000)
    u *= 0.9 * grid.dx / p.dt / np.abs(u).max(axis=1, keepdims=True)
    assert np.mean((u.min(axis=1) < 0.0) & (u.max(axis=1) > 0.0)) > 0.5
    lo, hi = u.min(axis=1), u.max(axis=1)
    f = np.zeros_like(u)
    for _ in range(50):
        u = burgers_step(u, f, p, grid)
        assert np.all(u.min(axis=1) >= lo - 1e-12)
        assert np.all(u.max(axis=1) <= hi + 1e-12)


def test_conservative_burgers_preserves_momentum() -> None:
    """Test the Godunov-flux update keeps Σu fixed on a periodic grid."""
    grid = Grid1D.from_spacing(0.02, periodic=True)
    p = _burgers(0.01, conservative=True)
    u = 0.2 + 0.1 * np.sin(2 * np.pi * grid.x)
    total = u.sum()
    f = np.zeros_like(u)
    for _ in range(100):
        u = burgers_step(u, f, p, grid)
    assert u.sum() == pytest.approx(total, abs=1e-12)


def test_burgers_constant_state_only_feels_forcing() -> None:
    """Test a constant field moves by dt·f."""
    grid = Grid1D.from_spacing(0.1, periodic=True)
    u = np.full(grid.n_x, 0.5)
    out = burgers_step(u, np.full(grid.n_x, 2.0), _burgers(0.01), grid)
    np.testing.assert_allclose(out, 0.52)


def test_burgers_cfl_violation() -> None:
    """Test a field too fast for the step size raises StabilityError."""
    grid = Grid1D.from_spacing(0.02, periodic=True)
    u = np.full(grid.n_x, 3.0)
    with pytest.raises(StabilityError, match="CFL"):
        burgers_step(u, np.zeros_like(u), _burgers(0.01), grid)


def test_neumann_laplacian_ghost_points() -> None:
    """Test constants have zero Laplacian and x² has 2 at the left wall."""
    grid = Grid1D.from_spacing(0.1)
    np.testing.assert_allclose(neumann_laplacian(np.full(grid.n_x, 3.0), grid.dx), 0.0)
    lap = neumann_laplacian(grid.x**2, grid.dx)
    np.testing.assert_allclose(lap[:-1], 2.0, atol=1e-9)


def test_fisher_stays_in_unit_interval() -> None:
    """Test unforced Fisher-KPP keeps 1000 clipped random fields inside [0, 1]."""
    grid = Grid1D.from_spacing(0.01)
    grf = GRFConfig(length_scale=0.2, variance=0.25)
    u = np.clip(0.5 + sample_grf_batch(grf, grid, 9, 1000), 0.0, 1.0)
    p = _fisher(0.001)
    f = np.zeros_like(u)
    for _ in range(20):
        u = fisher_kpp_step(u, f, p, grid)
        assert u.min() >= -1e-9
        assert u.max() <= 1.0 + 1e-9


def test_fisher_uniform_state_grows_by_reaction() -> None:
    """Test u ≡ 0.5 grows by about dt·r·u(1 − u) in one step."""
    grid = Grid1D.from_spacing(0.1)
    u = np.full(grid.n_x, 0.5)
    out = fisher_kpp_step(u, np.zeros_like(u), _fisher(0.01), grid)
    np.testing.assert_allclose(out, 0.5 + 0.01 * 0.25, atol=1e-6)


def test_fisher_forcing_is_subtracted() -> None:
    """Test forcing equal to the reaction term holds u ≡ 0.5 in place."""
    grid = Grid1D.from_spacing(0.1)
    u = np.full(grid.n_x, 0.5)
    v, history = fisher_kpp_newton(u, np.full(grid.n_x, 0.25), _fisher(), grid)
    np.testing.assert_allclose(v, 0.5)
    assert history == [0.0]


def test_fisher_newton_residuals_shrink() -> None:
    """Test Newton residuals fall below tolerance, each smaller than the last."""
    grid = Grid1D.from_spacing(0.05)
    u = 0.5 + 0.3 * np.cos(np.pi * grid.x)
    _, history = fisher_kpp_newton(u, np.zeros_like(u), _fisher(0.05), grid)
    assert len(history) >= 2
    assert history[-1] < 1e-10
    assert all(b < a for a, b in zip(history, history[1:], strict=False))


def test_fisher_newton_tail_is_quadratic() -> None:
    """Test the final Newton residual falls below the square of the one before it."""
    grid = Grid1D.from_spacing(0.05)
    u = 0.5 + 0.3 * np.cos(np.pi * grid.x)
    _, history = fisher_kpp_newton(u, np.zeros_like(u), _fisher(0.05), grid)
    prev, last = history[-2], history[-1]
    assert prev < 1e-4
    assert last < prev**2 / 1e-2


def test_fisher_newton_budget_exhausted() -> None:
    """Test ConvergenceError when the iteration cap is hit."""
    grid = Grid1D.from_spacing(0.1)
    u = np.full(grid.n_x, 0.3)
    with pytest.raises(ConvergenceError, match="did not converge"):
        fisher_kpp_newton(u, np.zeros_like(u), _fisher(newton_max_iter=1, newton_tol=1e-15), grid)


def test_advance_rejects_non_finite(mocker: MockerFixture) -> None:
    """Test advance raises DivergenceError when a stepper returns NaN."""
    grid = Grid1D.from_spacing(0.1)
    mocker.patch.dict(STEPPERS, {PDEKind.HEAT: lambda u, f, p, g: np.full_like(u, np.nan)})
    with pytest.raises(DivergenceError, match="non-finite"):
        advance(np.zeros(grid.n_x), np.zeros(grid.n_x), _heat(0.01), grid)


def test_rollout_annotates_failing_step() -> None:
    """Test a solver failure is re-raised with the failing step index."""
    grid = Grid1D.from_spacing(0.1, periodic=True)
    basis = ControlBasisConfig(n_actuators=1, mu=(0.5,), sigma=0.5, a_max=5000.0)
    # forcing pushes max|u| past the CFL bound after the first step
    amps = np.full((5, 1), 2000.0)
    with pytest.raises(StabilityError) as info:
        rollout_fdm(np.zeros(grid.n_x), amps, _burgers(0.01), basis, grid)
    assert isinstance(info.value, SolverError)
    assert info.value.step == 1
    assert str(info.value).startswith("step 1:")


def test_rollout_validates_shapes() -> None:
    """Test rollout_fdm rejects mismatched initial fields and amplitudes."""
    grid = Grid1D.from_spacing(0.1)
    basis = ControlBasisConfig(n_actuators=2, mu=(0.3, 0.7), sigma=0.1, a_max=1.0)
    with pytest.raises(ShapeError, match="amplitudes"):
        rollout_fdm(np.zeros(grid.n_x), np.zeros((3, 1)), _heat(0.01), basis, grid)
    with pytest.raises(ShapeError, match="Initial field"):
        rollout_fdm(np.zeros(4), np.zeros((3, 2)), _heat(0.01), basis, grid)


def test_rollout_without_steps_returns_initial_field() -> None:
    """Test an empty amplitude sequence yields a one-field trajectory."""
    grid = Grid1D.from_spacing(0.1)
    basis = ControlBasisConfig(n_actuators=2, mu=(0.3, 0.7), sigma=0.1, a_max=1.0)
    traj = rollout_fdm(np.ones(grid.n_x), np.empty((0, 2)), _heat(0.01), basis, grid)
    assert traj.fields.shape == (1, grid.n_x)
    assert traj.n_steps == 0


def test_heat_experiment_trajectory_shape() -> None:
    """Test the shipped heat experiment produces T/dt + 1 fields."""
    exp = load_experiment(CONFIGS / "heat.yaml")
    grid = build_grid(exp)
    amps = generate_training_amplitudes(exp.basis, exp.pde.n_steps, rng_seed=0)
    traj = rollout_fdm(np.zeros(grid.n_x), amps, exp.pde, exp.basis, grid, seed=0)
    assert traj.fields.shape == (401, 101)
    assert traj.amplitudes.shape == (400, 4)
    assert traj.dt == exp.pde.dt
    assert traj.seed == 0
    assert traj.is_finite()
