"""pde-dpc - differentiable predictive control of 1-D PDEs.

A time-integrated DeepONet learns ∂u/∂t from finite-difference simulations,
RK4 turns it into a differentiable one-step model, and a neural policy is
trained offline by backpropagating a constrained control objective through
surrogate rollouts. The trained policy is then deployed on the solver.

Example:
    >>> from pde_dpc import load_experiment, generate_dataset, train_operator
    >>> exp = load_experiment("configs/heat_desk.yaml")
    >>> data = generate_dataset(exp, 100, rng_seed=7, out_dir="runs/heat/dataset")
    >>> result = train_operator(data, exp.operator, rng_seed=0)
"""

import sys

from ._version import __version__
from .control import PolicyModel, ScenarioParams, dpc_loss, dpc_rollout, train_policy
from .data import DatasetHandle, generate_dataset
from .dsl import ExperimentConfig, load_experiment
from .runtime import Engine, Result, eval_path
from .surrogate import OperatorModel, operator_rollout, rk4_step, train_operator

__all__ = [
    "__version__",
    # DSL
    "ExperimentConfig",
    "load_experiment",
    # Models and training
    "DatasetHandle",
    "OperatorModel",
    "PolicyModel",
    "ScenarioParams",
    "dpc_loss",
    "dpc_rollout",
    "generate_dataset",
    "operator_rollout",
    "rk4_step",
    "train_operator",
    "train_policy",
    # Runtime
    "Engine",
    "Result",
    "eval_path",
]


def main() -> None:
    """Entry point of the ``pde-dpc`` command."""
    from .cli import main as cli_main

    sys.exit(cli_main())
