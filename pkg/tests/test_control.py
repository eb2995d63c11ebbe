"""Tests for the policy network, scenario sampling, DPC rollouts, loss and training."""

import logging
from pathlib import Path

import numpy as np
import pytest
from pytest_mock import MockerFixture

from pde_dpc.autodiff import Tensor, check_gradients
from pde_dpc.control import (
    DifferentiableRollout,
    PolicyModel,
    ScenarioParams,
    ScenarioSampler,
    curvature_density,
    dpc_loss,
    dpc_rollout,
    load_policy,
    save_policy,
    second_difference_matrix,
    train_policy,
)
from pde_dpc.control.train import build_policy
from pde_dpc.dsl.models import DPCLossConfig, ExperimentConfig
from pde_dpc.errors import ArtifactMismatchError, ConfigurationError, ShapeError
from pde_dpc.numerics import Grid1D, build_grid
from pde_dpc.surrogate import OperatorModel
from tests.fixtures import make_experiment, make_operator


def _rollout(states: list[np.ndarray], amps: list[np.ndarray], dt_op: float = 0.1) -> DifferentiableRollout:
    return DifferentiableRollout(
        states=[Tensor(np.atleast_2d(s)) for s in states],
        amplitudes=[Tensor(np.atleast_2d(a)) for a in amps],
        dt_op=dt_op,
    )


@pytest.fixture
def periodic_fine() -> Grid1D:
    return Grid1D.from_spacing(0.01, periodic=True)


@pytest.fixture
def policy(heat_experiment: ExperimentConfig) -> PolicyModel:
    grid = build_grid(heat_experiment)
    return build_policy(heat_experiment, grid.n_x, np.random.default_rng(0))


def test_policy_respects_amplitude_box() -> None:
    """Test outputs stay inside [−a_max, a_max] for 10⁴ wild inputs."""
    net = PolicyModel(6, 0, 3, width=16, depth=2, a_max=2.5, rng=np.random.default_rng(0))
    u = np.random.default_rng(1).normal(scale=100.0, size=(10_000, 6))
    amps = net(u).data
    assert amps.shape == (10_000, 3)
    assert np.all(np.abs(amps) <= 2.5)


def test_policy_single_and_batched(policy: PolicyModel, heat_grid: Grid1D) -> None:
    """Test act() equals the matching row of a batched call."""
    rng = np.random.default_rng(2)
    u = rng.normal(size=(3, heat_grid.n_x))
    targets = rng.normal(size=(3, heat_grid.n_x))
    batch = policy(u, targets).data
    single = policy.act(u[1], ScenarioParams(target=targets[1]))
    np.testing.assert_allclose(single, batch[1], atol=1e-14)
    assert single.shape == (2,)


def test_policy_feature_checks(policy: PolicyModel, heat_grid: Grid1D) -> None:
    """Test missing or misshapen scenario features raise ShapeError."""
    u = np.zeros((2, heat_grid.n_x))
    with pytest.raises(ShapeError, match="scenario features, got none"):
        policy(u)
    with pytest.raises(ShapeError, match="do not match"):
        policy(u, np.zeros((3, heat_grid.n_x)))
    with pytest.raises(ShapeError, match="state values"):
        policy(np.zeros((2, 4)), np.zeros((2, heat_grid.n_x)))
    featureless = PolicyModel(heat_grid.n_x, 0, 2, 4, 1, 1.0, np.random.default_rng(0))
    with pytest.raises(ShapeError, match="without scenario features"):
        featureless(u, np.zeros((2, 3)))


def test_init_scale_shrinks_output_layer() -> None:
    """Test init_scale = 0 starts from the zero controller."""
    net = PolicyModel(4, 0, 2, 8, 1, 3.0, np.random.default_rng(0), init_scale=0.0)
    np.testing.assert_array_equal(net(np.ones((5, 4))).data, 0.0)


def test_scenario_features_and_select() -> None:
    """Test features concatenate target then extra, and select keeps a batch axis."""
    scen = ScenarioParams(target=np.ones((3, 4)), extra=np.zeros((3, 2)))
    assert scen.n_features == 6
    picked = scen.select(1)
    assert picked.target is not None and picked.target.shape == (1, 4)
    assert ScenarioParams().features() is None
    assert ScenarioParams().n_features == 0


def test_sampler_grf_targets(heat_experiment: ExperimentConfig, heat_grid: Grid1D) -> None:
    """Test initial states and tapered targets are drawn reproducibly."""
    sampler = ScenarioSampler(heat_experiment, heat_grid)
    assert sampler.n_features == heat_grid.n_x
    u0, scen = sampler.sample(5, 3)
    assert u0.shape == (3, heat_grid.n_x)
    assert scen.target is not None and scen.target.shape == (3, heat_grid.n_x)
    np.testing.assert_allclose(scen.target[:, [0, -1]], 0.0, atol=1e-12)
    again, scen_again = sampler.sample(5, 3)
    np.testing.assert_array_equal(u0, again)
    np.testing.assert_array_equal(scen.target, scen_again.target)


def test_sampler_without_targets(burgers_experiment: ExperimentConfig) -> None:
    """Test curvature problems carry no scenario features."""
    grid = build_grid(burgers_experiment)
    sampler = ScenarioSampler(burgers_experiment, grid)
    _, scen = sampler.sample(0, 2)
    assert sampler.n_features == 0
    assert scen.target is None


def test_sampler_dataset_targets(fisher_experiment: ExperimentConfig) -> None:
    """Test dataset targets are rows of the pool and an empty pool is refused."""
    grid = build_grid(fisher_experiment)
    pool = np.stack([np.full(grid.n_x, v) for v in (0.1, 0.2, 0.3)])
    _, scen = ScenarioSampler(fisher_experiment, grid, pool).sample(1, 8)
    assert scen.target is not None
    assert set(np.round(scen.target[:, 0], 6)) <= {0.1, 0.2, 0.3}
    with pytest.raises(ConfigurationError, match="non-empty target pool"):
        ScenarioSampler(fisher_experiment, grid, np.empty((0, grid.n_x)))
    with pytest.raises(ConfigurationError, match="points"):
        ScenarioSampler(fisher_experiment, grid, np.zeros((2, grid.n_x + 1)))


def test_rollout_needs_frozen_operator(policy: PolicyModel, heat_operator: OperatorModel, heat_grid: Grid1D) -> None:
    """Test the rollout refuses a trainable operator."""
    with pytest.raises(ValueError, match="frozen"):
        dpc_rollout(policy, heat_operator, np.zeros(heat_grid.n_x), ScenarioParams(), 2, 0.02)


def test_rollout_shapes(policy: PolicyModel, heat_operator: OperatorModel, heat_grid: Grid1D) -> None:
    """Test N steps give N + 1 states and N amplitude rows, single or batched."""
    heat_operator.freeze()
    target = np.zeros(heat_grid.n_x)
    single = dpc_rollout(policy, heat_operator, np.zeros(heat_grid.n_x), ScenarioParams(target), 4, 0.02)
    assert single.n_steps == 4
    assert single.state_array().shape == (1, 5, heat_grid.n_x)
    assert single.amplitude_array().shape == (1, 4, 2)
    assert single.to_trajectory().fields.shape == (5, heat_grid.n_x)

    batch = dpc_rollout(
        policy, heat_operator, np.zeros((3, heat_grid.n_x)), ScenarioParams(np.zeros((3, heat_grid.n_x))), 2, 0.02
    )
    assert batch.batch_size == 3
    empty = dpc_rollout(policy, heat_operator, np.zeros(heat_grid.n_x), ScenarioParams(target), 0, 0.02)
    assert empty.amplitude_array().shape == (1, 0, 0)


def test_second_difference_matrix(periodic_fine: Grid1D) -> None:
    """Test the periodic matrix wraps and the Dirichlet matrix has zero wall rows."""
    d2 = second_difference_matrix(periodic_fine)
    assert d2[0, -1] == pytest.approx(1.0 / 0.01**2)
    walls = second_difference_matrix(Grid1D.from_spacing(0.1))
    assert not walls[0].any() and not walls[-1].any()


def test_curvature_of_a_sine(periodic_fine: Grid1D) -> None:
    """Test ∫(u_xx)² of sin(2πx) is (2π)⁴/2 ≈ 779.27."""
    u = np.sin(2 * np.pi * periodic_fine.x)
    assert curvature_density(u, periodic_fine) == pytest.approx(779.27, rel=0.02)


def test_curvature_loss_normalization(periodic_fine: Grid1D) -> None:
    """Test the stage term is Q·ℓ·dt_op averaged over m·N·n_x."""
    u = np.sin(2 * np.pi * periodic_fine.x)
    rollout = _rollout([np.zeros_like(u), u], [np.zeros(2)], dt_op=0.1)
    cfg = DPCLossConfig(cost="curvature_integral", stage_weight=2.0, terminal_weight=0.0)
    expected = 2.0 * curvature_density(u, periodic_fine) * 0.1 / periodic_fine.n_x
    assert dpc_loss(rollout, ScenarioParams(), cfg, periodic_fine).item() == pytest.approx(expected, rel=1e-12)


def test_state_and_control_penalties() -> None:
    """Test squared ReLU penalties on states u_1..u_N and amplitudes a_0..a_{N−1}."""
    grid = Grid1D.from_spacing(0.1, periodic=True)
    n = grid.n_x
    cfg = DPCLossConfig(
        cost="curvature_integral",
        constraints=[
            {"name": "u-max", "on": "state", "threshold": 1.0},
            {"name": "a-max", "on": "control", "threshold": 2.0},
        ],
    )
    # u_0 violates too but is not penalized
    rollout = _rollout([np.full(n, 5.0), np.full(n, 2.0)], [np.array([3.0, 0.0])])
    loss = dpc_loss(rollout, ScenarioParams(), cfg, grid).item()
    assert loss == pytest.approx((100.0 * n + 100.0 * 1.0) / n)


def test_constraint_coefficient_flips_direction() -> None:
    """Test coefficient −1 turns the constraint into a lower bound."""
    grid = Grid1D.from_spacing(0.1, periodic=True)
    n = grid.n_x
    cfg = DPCLossConfig(
        cost="curvature_integral",
        constraints=[{"name": "u-min", "on": "state", "coefficient": -1.0, "threshold": 0.5}],
    )
    inside = _rollout([np.zeros(n), np.full(n, -0.5)], [np.zeros(2)])
    outside = _rollout([np.zeros(n), np.full(n, -1.5)], [np.zeros(2)])
    assert dpc_loss(inside, ScenarioParams(), cfg, grid).item() == 0.0
    assert dpc_loss(outside, ScenarioParams(), cfg, grid).item() == pytest.approx(100.0)


def test_terminal_tracking_and_control_cost() -> None:
    """Test the terminal term is Q_N·‖u_N − target‖²·Δx and control cost is per actuator."""
    grid = Grid1D.from_spacing(0.1)
    n = grid.n_x
    target = np.linspace(0, 1, n)
    cfg = DPCLossConfig(cost="terminal_tracking", terminal_weight=3.0, control_weight=0.5)
    rollout = _rollout([np.zeros(n), np.zeros(n), target + 1.0], [np.ones(2), np.ones(2)], dt_op=0.1)
    loss = dpc_loss(rollout, ScenarioParams(target=target[None, :]), cfg, grid).item()
    expected = (3.0 * n * grid.dx + 0.5 * 2 * 2 * 0.1) / (2 * n)
    assert loss == pytest.approx(expected)
    with pytest.raises(ValueError, match="needs scenario targets"):
        dpc_loss(rollout, ScenarioParams(), cfg, grid)


def test_loss_is_a_batch_average(periodic_fine: Grid1D) -> None:
    """Test duplicating every scenario leaves the loss unchanged."""
    rng = np.random.default_rng(3)
    states = [rng.normal(size=periodic_fine.n_x) for _ in range(3)]
    amps = [rng.normal(size=2) for _ in range(2)]
    cfg = DPCLossConfig(
        cost="curvature_integral",
        control_weight=0.1,
        constraints=[{"name": "u-max", "on": "state", "threshold": 1.0}],
    )
    once = dpc_loss(_rollout(states, amps), ScenarioParams(), cfg, periodic_fine).item()
    doubled = _rollout([np.stack([s, s]) for s in states], [np.stack([a, a]) for a in amps])
    twice = dpc_loss(doubled, ScenarioParams(), cfg, periodic_fine).item()
    assert twice == pytest.approx(once, rel=1e-12)


def test_loss_gradients_reach_the_policy(
    policy: PolicyModel, heat_operator: OperatorModel, heat_experiment: ExperimentConfig, heat_grid: Grid1D
) -> None:
    """Test policy gradients through the frozen surrogate match finite differences."""
    heat_operator.freeze()
    u0, scen = ScenarioSampler(heat_experiment, heat_grid).sample(0, 2)

    def loss() -> Tensor:
        rollout = dpc_rollout(policy, heat_operator, u0, scen, 3, heat_experiment.dt_op)
        return dpc_loss(rollout, scen, heat_experiment.loss, heat_grid)

    assert check_gradients(loss, policy.parameters()) < 1e-4


def test_train_policy_without_epochs(heat_operator: OperatorModel, heat_experiment: ExperimentConfig) -> None:
    """Test zero epochs returns the initialized policy untouched."""
    exp = heat_experiment.model_copy(update={"policy": heat_experiment.policy.model_copy(update={"epochs": 0})})
    result = train_policy(heat_operator, exp, rng_seed=3)
    reference = build_policy(exp, build_grid(exp).n_x, np.random.default_rng(3))
    for name, value in reference.state_arrays().items():
        np.testing.assert_array_equal(result.policy.state_arrays()[name], value)
    assert result.curve == []
    assert heat_operator.frozen


def test_train_policy_leaves_operator_untouched(
    heat_operator: OperatorModel, heat_experiment: ExperimentConfig
) -> None:
    """Test training records a curve and never updates the surrogate."""
    before = heat_operator.state_arrays()
    result = train_policy(heat_operator, heat_experiment, rng_seed=0)
    assert len(result.curve) == 2
    assert all(np.isfinite(r.loss) for r in result.curve)
    assert result.curve[-1].best_loss == min(r.loss for r in result.curve)
    for name, value in heat_operator.state_arrays().items():
        np.testing.assert_array_equal(value, before[name])


def test_train_policy_with_dataset_targets(fisher_experiment: ExperimentConfig) -> None:
    """Test terminal targets drawn from a pool drive training."""
    operator = make_operator(fisher_experiment)
    pool = np.full((4, build_grid(fisher_experiment).n_x), 0.5)
    result = train_policy(operator, fisher_experiment, rng_seed=0, target_pool=pool)
    assert result.policy.n_features == pool.shape[1]
    assert len(result.curve) == 2


def test_train_policy_aborts_on_nan(
    heat_operator: OperatorModel,
    heat_experiment: ExperimentConfig,
    mocker: MockerFixture,
    caplog: pytest.LogCaptureFixture,
) -> None:
    """Test a non-finite loss restores the last stable parameters."""
    mocker.patch("pde_dpc.control.train.dpc_loss", return_value=Tensor(np.nan))
    with caplog.at_level(logging.WARNING):
        result = train_policy(heat_operator, heat_experiment, rng_seed=0)
    assert result.aborted
    assert result.curve == []
    assert any("aborted" in r.message for r in caplog.records)


def test_policy_checkpoint_round_trip(
    tmp_path: Path, policy: PolicyModel, heat_experiment: ExperimentConfig, heat_grid: Grid1D
) -> None:
    """Test a saved policy reloads with identical actions and checks its config."""
    path = save_policy(tmp_path / "policy.ckpt", policy, heat_experiment)
    loaded = load_policy(path, heat_experiment)
    u, target = np.linspace(0, 1, heat_grid.n_x), np.ones(heat_grid.n_x)
    np.testing.assert_array_equal(
        loaded.act(u, ScenarioParams(target)), policy.act(u, ScenarioParams(target))
    )
    with pytest.raises(ArtifactMismatchError):
        load_policy(path, make_experiment("heat", basis={"a_max": 7.0}))


def test_policy_checkpoint_with_other_target_field_warns(
    tmp_path: Path,
    policy: PolicyModel,
    heat_experiment: ExperimentConfig,
    caplog: pytest.LogCaptureFixture,
) -> None:
    """Test a policy trained against another target field loads with a warning."""
    path = save_policy(tmp_path / "policy.ckpt", policy, heat_experiment)
    other = make_experiment("heat", grf_target={"length_scale": 0.6})
    with caplog.at_level(logging.WARNING):
        load_policy(path, other)
    assert any("different settings" in r.message for r in caplog.records)

