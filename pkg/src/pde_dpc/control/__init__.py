"""Neural control policy, DPC loss and offline policy training."""

from .io import load_policy, save_policy
from .loss import curvature_density, dpc_loss, second_difference_matrix
from .policy import PolicyModel, ScenarioParams, policy_forward
from .rollout import DifferentiableRollout, dpc_rollout
from .scenarios import ScenarioSampler
from .train import PolicyEpochRecord, PolicyTrainingResult, build_policy, train_policy

__all__ = [
    "DifferentiableRollout",
    "PolicyEpochRecord",
    "PolicyModel",
    "PolicyTrainingResult",
    "ScenarioParams",
    "ScenarioSampler",
    "build_policy",
    "curvature_density",
    "dpc_loss",
    "dpc_rollout",
    "load_policy",
    "policy_forward",
    "save_policy",
    "second_difference_matrix",
    "train_policy",
]
