"""Sampling of (u0, ξ) scenarios from an experiment's distributions."""

import numpy as np

from ..dsl.models import ExperimentConfig
from ..errors import ConfigurationError
from ..numerics.grf import sample_grf_batch
from ..numerics.grid import Grid1D
from ..numerics.seeding import derive_seed
from ..numerics.types import Array
from .policy import ScenarioParams


class ScenarioSampler:
    """Draws initial states from ``grf_policy_ic`` and targets per ``target_source``.

    Args:
        experiment: Experiment whose distributions are sampled
        grid: Grid of the experiment
        target_pool: Candidate targets (count, n_x) when targets come from a dataset
    """

    def __init__(
        self, experiment: ExperimentConfig, grid: Grid1D, target_pool: Array | None = None
    ) -> None:
        self.experiment = experiment
        self.grid = grid
        if experiment.target_source == "dataset":
            if target_pool is None or len(target_pool) == 0:
                raise ConfigurationError("target_source=dataset needs a non-empty target pool")
            if target_pool.shape[-1] != grid.n_x:
                raise ConfigurationError(
                    f"Target pool fields have {target_pool.shape[-1]} points, grid has {grid.n_x}"
                )
        self.target_pool = target_pool

    @property
    def n_features(self) -> int:
        return self.grid.n_x if self.experiment.uses_target else 0

    def sample(self, rng_seed: int, count: int) -> tuple[Array, ScenarioParams]:
        """``count`` initial states (count, n_x) and their scenario parameters."""
        exp = self.experiment
        u0 = sample_grf_batch(exp.grf_policy_ic, self.grid, derive_seed(rng_seed, 0), count)
        target: Array | None = None
        if exp.target_source == "grf" and exp.grf_target is not None:
            target = sample_grf_batch(exp.grf_target, self.grid, derive_seed(rng_seed, 1), count)
        elif exp.target_source == "dataset" and self.target_pool is not None:
            rng = np.random.default_rng(derive_seed(rng_seed, 1))
            target = self.target_pool[rng.integers(len(self.target_pool), size=count)].copy()
        return u0, ScenarioParams(target=target)
