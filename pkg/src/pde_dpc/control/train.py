"""Offline policy training by backpropagation through the frozen surrogate."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..autodiff import Adam, Tape
from ..dsl.models import ExperimentConfig
from ..errors import DivergenceError, SolverError
from ..numerics.grid import build_grid
from ..numerics.seeding import derive_seed
from ..numerics.types import Array
from ..surrogate.model import OperatorModel
from .loss import dpc_loss
from .policy import PolicyModel
from .rollout import dpc_rollout
from .scenarios import ScenarioSampler

logger = logging.getLogger(__name__)


@dataclass
class PolicyEpochRecord:
    epoch: int
    loss: float
    best_loss: float


@dataclass
class PolicyTrainingResult:
    policy: PolicyModel
    curve: list[PolicyEpochRecord] = field(default_factory=list)
    aborted: bool = False


def build_policy(experiment: ExperimentConfig, n_features: int, rng: np.random.Generator) -> PolicyModel:
    grid = build_grid(experiment)
    cfg = experiment.policy
    return PolicyModel(
        n_x=grid.n_x,
        n_features=n_features,
        n_actuators=experiment.basis.n_actuators,
        width=cfg.width,
        depth=cfg.depth,
        a_max=experiment.basis.a_max,
        rng=rng,
        init_scale=cfg.init_scale,
        input_scale=1.0 / float(np.sqrt(experiment.grf_policy_ic.variance)),
    )


def train_policy(
    operator: OperatorModel,
    experiment: ExperimentConfig,
    rng_seed: int,
    target_pool: Array | None = None,
) -> PolicyTrainingResult:
    """Minimize the empirical DPC loss over freshly sampled scenario minibatches.

    The operator is frozen first and never updated. A non-finite loss or a
    diverging rollout stops training and restores the last completed epoch.
    """
    operator.freeze()
    grid = build_grid(experiment)
    sampler = ScenarioSampler(experiment, grid, target_pool)
    cfg = experiment.policy
    policy = build_policy(experiment, sampler.n_features, np.random.default_rng(rng_seed))
    result = PolicyTrainingResult(policy=policy)
    if cfg.epochs == 0:
        return result

    optimizer = Adam(
        policy.parameters(),
        lr=cfg.optimizer.learning_rate,
        betas=(cfg.optimizer.beta1, cfg.optimizer.beta2),
        eps=cfg.optimizer.epsilon,
        grad_clip=cfg.optimizer.grad_clip,
    )
    stable = policy.state_arrays()
    best = float("inf")

    for epoch in range(cfg.epochs):
        losses = []
        for batch in range(cfg.batches_per_epoch):
            u0, scen = sampler.sample(derive_seed(rng_seed, epoch, batch), cfg.batch_size)
            optimizer.zero_grad()
            try:
                with Tape() as tape:
                    rollout = dpc_rollout(policy, operator, u0, scen, experiment.horizon, experiment.dt_op)
                    loss = dpc_loss(rollout, scen, experiment.loss, grid)
                    value = loss.item()
                    if not np.isfinite(value):
                        raise DivergenceError(f"non-finite DPC loss {value}")
                    tape.backward(loss)
            except SolverError:
                logger.warning(
                    f"Policy training aborted at epoch {epoch}; restoring last stable parameters",
                    exc_info=True,
                )
                policy.load_state_arrays(stable)
                result.aborted = True
                return result
            optimizer.step()
            losses.append(value)

        epoch_loss = float(np.mean(losses))
        best = min(best, epoch_loss)
        stable = policy.state_arrays()
        result.curve.append(PolicyEpochRecord(epoch, epoch_loss, best))
        logger.info(
            f"Policy epoch {epoch}: loss {epoch_loss:.4e}",
            extra={"epoch": {"epoch": epoch, "loss": epoch_loss, "best": best}},
        )
    return result
