"""Test fixtures and helper functions for test cases.

Every experiment here is deliberately tiny (a handful of grid points, a few
solver steps, networks a few units wide) so the whole suite runs in minutes.
"""

import copy
from pathlib import Path
from typing import Any

import numpy as np
import pytest
import yaml

from pde_dpc.data.dataset import DatasetHandle, generate_dataset
from pde_dpc.dsl.models import ExperimentConfig
from pde_dpc.numerics.grid import Grid1D, build_grid
from pde_dpc.surrogate.model import Normalizer, OperatorModel

_SMALL_NETWORKS: dict[str, Any] = {
    "operator": {
        "architecture": {"width": 8, "depth": 1, "latent_dim": 4, "activation": "tanh"},
        "optimizer": {"learning_rate": 0.01},
        "batch_size": 16,
        "epochs": 2,
        "seed": 3,
    },
    "policy": {
        "width": 8,
        "depth": 1,
        "optimizer": {"learning_rate": 0.01},
        "batch_size": 3,
        "batches_per_epoch": 2,
        "epochs": 2,
        "init_scale": 0.5,
        "seed": 4,
    },
    "evaluation": {"n_eval": 2, "seed": 99, "figures": 1},
}

BASE_EXPERIMENTS: dict[str, dict[str, Any]] = {
    "heat": {
        "name": "tiny-heat",
        "pde": {"kind": "heat", "bc": "dirichlet0", "alpha": 0.1, "dt": 0.01, "T": 0.1},
        "grid": {"dx": 0.1},
        "basis": {"n_actuators": 2, "mu": [0.3, 0.7], "sigma": 0.15, "a_max": 5.0},
        "grf_train": {"length_scale": 0.4, "variance": 1.0},
        "grf_policy_ic": {"length_scale": 0.3, "variance": 1.0},
        "target_source": "grf",
        "grf_target": {"length_scale": 0.4, "variance": 1.0, "taper": True},
        "dataset": {"n_samples": 16, "stride": 2, "train_fraction": 0.5, "seed": 7},
        "loss": {"cost": "terminal_tracking", "stage_weight": 0.0, "terminal_weight": 1.0},
        **_SMALL_NETWORKS,
    },
    "burgers": {
        "name": "tiny-burgers",
        "pde": {"kind": "burgers", "bc": "periodic", "dt": 0.005, "T": 0.05},
        "grid": {"dx": 0.05},
        "basis": {"n_actuators": 2, "mu": [0.3, 0.6], "sigma": 0.15, "a_max": 2.0},
        "grf_train": {"length_scale": 0.25, "variance": 0.25, "periodic_projection": True},
        "grf_policy_ic": {"length_scale": 0.5, "variance": 0.25, "periodic_projection": True},
        "target_source": "none",
        "dataset": {"n_samples": 16, "stride": 2, "train_fraction": 0.5, "seed": 8},
        "loss": {"cost": "curvature_integral", "stage_weight": 1.0, "terminal_weight": 0.0},
        **_SMALL_NETWORKS,
    },
    "fisher_kpp": {
        "name": "tiny-fisher",
        "pde": {
            "kind": "fisher_kpp",
            "bc": "neumann0",
            "alpha": 0.01,
            "r": 1.0,
            "dt": 0.01,
            "T": 0.1,
        },
        "grid": {"dx": 0.1},
        "basis": {"n_actuators": 2, "mu": [0.3, 0.7], "sigma": 0.15, "a_max": 2.0},
        "grf_train": {"length_scale": 0.3, "variance": 0.04},
        "grf_policy_ic": {"length_scale": 0.5, "variance": 0.04},
        "target_source": "dataset",
        "dataset": {"n_samples": 16, "stride": 2, "train_fraction": 0.5, "seed": 9},
        "loss": {"cost": "terminal_tracking", "stage_weight": 0.0, "terminal_weight": 1.0},
        **_SMALL_NETWORKS,
    },
}


def _merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def experiment_dict(kind: str = "heat", **overrides: Any) -> dict[str, Any]:
    """Raw config mapping of a tiny experiment with nested ``overrides`` applied.

    Args:
        kind: One of "heat", "burgers", "fisher_kpp"
        **overrides: Section overrides, merged recursively

    Returns:
        Mapping accepted by ``ExperimentConfig.model_validate``
    """
    return _merge(BASE_EXPERIMENTS[kind], overrides)


def make_experiment(kind: str = "heat", **overrides: Any) -> ExperimentConfig:
    """Validated tiny experiment; see :func:`experiment_dict`."""
    return ExperimentConfig.model_validate(experiment_dict(kind, **overrides))


def make_operator(experiment: ExperimentConfig, seed: int = 0) -> OperatorModel:
    """Untrained operator with identity normalization on the experiment grid."""
    grid = build_grid(experiment)
    return OperatorModel(
        grid.x,
        experiment.basis.n_actuators,
        experiment.operator.architecture,
        Normalizer.identity(grid.n_x, experiment.basis.a_max),
        np.random.default_rng(seed),
    )


@pytest.fixture
def heat_experiment() -> ExperimentConfig:
    return make_experiment("heat")


@pytest.fixture
def burgers_experiment() -> ExperimentConfig:
    return make_experiment("burgers")


@pytest.fixture
def fisher_experiment() -> ExperimentConfig:
    return make_experiment("fisher_kpp")


@pytest.fixture
def heat_grid(heat_experiment: ExperimentConfig) -> Grid1D:
    return build_grid(heat_experiment)


@pytest.fixture
def fine_grid() -> Grid1D:
    """Unit interval at dx = 10⁻², Dirichlet layout (101 points)."""
    return Grid1D.from_spacing(0.01)


@pytest.fixture
def heat_dataset(tmp_path: Path, heat_experiment: ExperimentConfig) -> DatasetHandle:
    """Sixteen tiny heat trajectories written under ``tmp_path/dataset``."""
    return generate_dataset(heat_experiment, 16, rng_seed=7, out_dir=tmp_path / "dataset")


@pytest.fixture
def heat_operator(heat_experiment: ExperimentConfig) -> OperatorModel:
    return make_operator(heat_experiment)


@pytest.fixture
def experiment_file(tmp_path: Path) -> Path:
    """Tiny heat experiment written as YAML."""
    path = tmp_path / "heat.yaml"
    path.write_text(yaml.safe_dump(experiment_dict("heat")), encoding="utf-8")
    return path
