"""Time-integrated DeepONet surrogate: model, RK4 stepping, training and checkpoints."""

from .integrate import RightHandSide, operator_rollout, relative_l2, rk4_step, rollout_states
from .io import load_operator, save_operator
from .model import Normalizer, OperatorModel
from .train import (
    EpochRecord,
    OperatorTrainingResult,
    build_operator,
    evaluate_operator,
    rollout_steps_for_epoch,
    train_operator,
    window_loss,
)

__all__ = [
    "EpochRecord",
    "Normalizer",
    "OperatorModel",
    "OperatorTrainingResult",
    "RightHandSide",
    "build_operator",
    "evaluate_operator",
    "load_operator",
    "operator_rollout",
    "relative_l2",
    "rk4_step",
    "rollout_states",
    "rollout_steps_for_epoch",
    "save_operator",
    "train_operator",
    "window_loss",
]
