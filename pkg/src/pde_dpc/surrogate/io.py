"""Operator checkpoint persistence."""

from pathlib import Path

from ..checkpoint import CheckpointHeader, check_config_hash, load_checkpoint, save_checkpoint
from ..dsl.models import ExperimentConfig
from .model import OperatorModel


def save_operator(path: str | Path, model: OperatorModel, experiment: ExperimentConfig) -> Path:
    header = CheckpointHeader(
        kind="operator",
        experiment=experiment.name,
        config_hash=experiment.config_hash(),
        full_hash=experiment.full_hash(),
        spec=model.spec(),
    )
    return save_checkpoint(path, header, model.checkpoint_arrays())


def load_operator(
    path: str | Path, experiment: ExperimentConfig | None = None, force: bool = False
) -> OperatorModel:
    """Load a checkpoint, checking it against ``experiment`` when one is given."""
    header, arrays = load_checkpoint(path, kind="operator")
    if experiment is not None:
        check_config_hash(header, experiment.config_hash(), force, experiment.full_hash())
    return OperatorModel.from_checkpoint(header.spec, arrays)
