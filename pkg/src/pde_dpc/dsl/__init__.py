"""Declarative experiment configuration layer."""

from .models import (
    AcceptanceRule,
    AffineConstraint,
    ArchitectureConfig,
    BoundaryCondition,
    ControlBasisConfig,
    DatasetConfig,
    DPCLossConfig,
    EvaluationConfig,
    ExcitationConfig,
    ExperimentConfig,
    GridSpec,
    GRFConfig,
    OperatorTrainConfig,
    OptimizerConfig,
    PDEKind,
    PDEParams,
    PolicyConfig,
)
from .parser import load_experiment

__all__ = [
    "AcceptanceRule",
    "AffineConstraint",
    "ArchitectureConfig",
    "BoundaryCondition",
    "ControlBasisConfig",
    "DatasetConfig",
    "DPCLossConfig",
    "EvaluationConfig",
    "ExcitationConfig",
    "ExperimentConfig",
    "GridSpec",
    "GRFConfig",
    "OperatorTrainConfig",
    "OptimizerConfig",
    "PDEKind",
    "PDEParams",
    "PolicyConfig",
    "load_experiment",
]
