"""Integration-matching training of the operator surrogate."""

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..autodiff import Adam, Tape, Tensor, mean, square
from ..data.dataset import DatasetHandle
from ..data.transitions import RolloutWindows, coarsen
from ..dsl.models import OperatorTrainConfig
from ..errors import DatasetError, DivergenceError
from ..numerics.grid import Grid1D
from .integrate import operator_rollout, relative_l2, rk4_step
from .model import Normalizer, OperatorModel

logger = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    best_loss: float
    rollout_steps: int


@dataclass
class OperatorTrainingResult:
    model: OperatorModel
    curve: list[EpochRecord] = field(default_factory=list)
    aborted: bool = False

    @property
    def final_loss(self) -> float | None:
        return self.curve[-1].loss if self.curve else None


def rollout_steps_for_epoch(cfg: OperatorTrainConfig, epoch: int) -> int:
    """Curriculum ramps the integrated steps from 1 to ``rollout_loss_steps``."""
    target = cfg.rollout_loss_steps
    if not cfg.curriculum or cfg.epochs <= 1:
        return target
    return min(target, 1 + (epoch * target) // cfg.epochs)


def window_loss(model: OperatorModel, windows: RolloutWindows) -> Tensor:
    """Mean squared standardized error of RK4 predictions over every window step."""
    u = Tensor(windows.u0)
    inv_std = 1.0 / model.normalizer.std
    terms = []
    for k in range(windows.steps):
        u = rk4_step(model, u, windows.amps[:, k, :], windows.dt_op)
        terms.append(mean(square((u - windows.targets[:, k, :]) * inv_std)))
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    return total * (1.0 / len(terms))


def build_operator(
    data: DatasetHandle, cfg: OperatorTrainConfig, rng: np.random.Generator
) -> OperatorModel:
    """Fresh model with normalization statistics of the training split."""
    m = data.manifest
    grid = Grid1D(n_x=m.n_x, dx=m.dx, periodic=m.pde.bc == "periodic")
    pairs = data.windows("train", 1)
    normalizer = Normalizer.fit(
        pairs.u0, pairs.targets[:, 0, :], pairs.dt_op, m.basis.a_max, cfg.std_floor
    )
    return OperatorModel(grid.x, m.n_actuators, cfg.architecture, normalizer, rng)


def train_operator(
    data: DatasetHandle, cfg: OperatorTrainConfig, rng_seed: int
) -> OperatorTrainingResult:
    """Fit θ so that RK4(G_θ) reproduces the solver's operator-step transitions.

    A non-finite loss stops training and restores the parameters of the last
    completed epoch.
    """
    rng = np.random.default_rng(rng_seed)
    model = build_operator(data, cfg, rng)
    result = OperatorTrainingResult(model=model)
    if cfg.epochs == 0:
        return result

    optimizer = Adam(
        model.parameters(),
        lr=cfg.optimizer.learning_rate,
        betas=(cfg.optimizer.beta1, cfg.optimizer.beta2),
        eps=cfg.optimizer.epsilon,
        grad_clip=cfg.optimizer.grad_clip,
    )
    windows: dict[int, RolloutWindows] = {}
    stable = model.state_arrays()
    best = float("inf")

    for epoch in range(cfg.epochs):
        steps = rollout_steps_for_epoch(cfg, epoch)
        if steps not in windows:
            windows[steps] = data.windows("train", steps)
        train = windows[steps]
        order = rng.permutation(len(train))

        total, seen = 0.0, 0
        for start in range(0, len(order), cfg.batch_size):
            batch = train.take(order[start : start + cfg.batch_size])
            optimizer.zero_grad()
            try:
                with Tape() as tape:
                    loss = window_loss(model, batch)
                    value = loss.item()
                    if not np.isfinite(value):
                        raise DivergenceError(f"non-finite training loss {value}")
                    tape.backward(loss)
            except DivergenceError:
                logger.warning(
                    f"Operator training aborted at epoch {epoch}; restoring last stable parameters",
                    exc_info=True,
                )
                model.load_state_arrays(stable)
                result.aborted = True
                return result
            optimizer.step()
            total += value * len(batch)
            seen += len(batch)

        epoch_loss = total / max(seen, 1)
        best = min(best, epoch_loss)
        stable = model.state_arrays()
        result.curve.append(EpochRecord(epoch, epoch_loss, best, steps))
        logger.info(
            f"Operator epoch {epoch}: loss {epoch_loss:.4e}",
            extra={"epoch": {"epoch": epoch, "loss": epoch_loss, "best": best, "steps": steps}},
        )
    return result


def evaluate_operator(
    model: OperatorModel, data: DatasetHandle, split: Literal["train", "test"] = "test"
) -> float:
    """Mean full-horizon relative L2 error of surrogate rollouts over ``split``."""
    stride = data.manifest.stride
    errors = []
    for traj in data.trajectories(split):
        truth = coarsen(traj, stride)
        pred = operator_rollout(model, truth.initial, truth.amplitudes, truth.dt)
        errors.append(relative_l2(pred, truth))
    if not errors:
        raise DatasetError(f"No {split} samples to evaluate in {data.root}")
    return float(np.mean(errors))
