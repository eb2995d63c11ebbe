import logging
from pathlib import Path

import yaml

from .models import ExperimentConfig

logger = logging.getLogger(__name__)


def load_experiment(file_path: str | Path) -> ExperimentConfig:
    """Load and validate an experiment config (YAML, or JSON with the same schema)."""
    with open(file_path, encoding="utf-8") as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict):
        raise ValueError(f"{file_path}: expected a mapping at the top level")
    config = ExperimentConfig.model_validate(data)
    logger.debug(
        "Experiment config loaded",
        extra={"config": {"path": str(file_path), "name": config.name, "hash": config.config_hash()}},
    )
    return config
