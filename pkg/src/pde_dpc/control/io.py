"""Policy checkpoint persistence."""

from pathlib import Path

from ..checkpoint import CheckpointHeader, check_config_hash, load_checkpoint, save_checkpoint
from ..dsl.models import ExperimentConfig
from .policy import PolicyModel


def save_policy(path: str | Path, policy: PolicyModel, experiment: ExperimentConfig) -> Path:
    header = CheckpointHeader(
        kind="policy",
        experiment=experiment.name,
        config_hash=experiment.config_hash(),
        full_hash=experiment.full_hash(),
        spec=policy.spec(),
    )
    return save_checkpoint(path, header, policy.state_arrays())


def load_policy(
    path: str | Path, experiment: ExperimentConfig | None = None, force: bool = False
) -> PolicyModel:
    header, arrays = load_checkpoint(path, kind="policy")
    if experiment is not None:
        check_config_hash(header, experiment.config_hash(), force, experiment.full_hash())
    policy = PolicyModel.from_spec(header.spec)
    policy.load_state_arrays(arrays)
    return policy
