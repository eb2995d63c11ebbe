"""Generation and loading of operator-training corpora."""

import logging
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from .._version import __version__
from ..dsl.models import ExperimentConfig
from ..errors import ArtifactMismatchError, DatasetError
from ..numerics.basis import generate_training_amplitudes, hold_amplitudes
from ..numerics.grf import sample_grf
from ..numerics.grid import Grid1D, build_grid
from ..numerics.seeding import derive_seed
from ..numerics.solvers import rollout_fdm
from ..numerics.trajectory import Trajectory
from ..numerics.types import Array
from ..runtime.pool import run_pool
from ..runtime.results import Result, with_solver_error_handling, with_timing_logging
from .manifest import MANIFEST_NAME, DatasetManifest, SampleRecord
from .storage import read_trajectory, trajectory_filename, write_trajectory
from .transitions import RolloutWindows, TransitionBatch, to_transitions, to_windows

logger = logging.getLogger(__name__)

Split = Literal["train", "test"]

_SPLIT_BUCKETS = 10_000


def sample_seed(dataset_seed: int, index: int) -> int:
    return derive_seed(dataset_seed, index)


def split_of(dataset_seed: int, index: int, train_fraction: float) -> Split:
    """Hash-based assignment, stable under changes of n_samples."""
    bucket = derive_seed(dataset_seed, index, 2) % _SPLIT_BUCKETS
    return "train" if bucket < train_fraction * _SPLIT_BUCKETS else "test"


def simulate_sample(experiment: ExperimentConfig, grid: Grid1D, seed: int) -> Trajectory:
    """One GRF initial condition driven by held excitation amplitudes."""
    u0 = sample_grf(experiment.grf_train, grid, derive_seed(seed, 0))
    control = generate_training_amplitudes(experiment.basis, experiment.horizon, derive_seed(seed, 1))
    amps = hold_amplitudes(control, experiment.dataset.stride)
    return rollout_fdm(
        u0, amps, experiment.pde, experiment.basis, grid, seed=seed, grf=experiment.grf_train
    )


@dataclass(frozen=True)
class _SampleJob:
    index: int
    seed: int
    split: Split


@with_timing_logging
@with_solver_error_handling
def _generate_sample(
    experiment: ExperimentConfig, grid: Grid1D, root: Path, index: int, seed: int, split: Split
) -> Result[SampleRecord]:
    traj = simulate_sample(experiment, grid, seed)
    name = trajectory_filename(index)
    write_trajectory(root / name, traj.fields, traj.amplitudes)
    return Result.ok(SampleRecord(index=index, seed=seed, status="ok", split=split, file=name))


def _clear_previous(root: Path) -> None:
    for stale in root.glob("traj_*.bin"):
        stale.unlink()
    (root / MANIFEST_NAME).unlink(missing_ok=True)


def generate_dataset(
    experiment: ExperimentConfig,
    n_samples: int,
    rng_seed: int,
    out_dir: str | Path,
    threads: int = 1,
) -> "DatasetHandle":
    """Roll out ``n_samples`` trajectories and persist them with a manifest.

    Failed samples are recorded in the manifest without a file.

    Raises:
        DatasetError: More than ``dataset.max_failure_fraction`` of samples failed.
    """
    if n_samples < 0:
        raise ValueError(f"n_samples must be >= 0, got {n_samples}")
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    _clear_previous(root)
    grid = build_grid(experiment)
    fraction = experiment.dataset.train_fraction

    jobs = [
        _SampleJob(index=i, seed=sample_seed(rng_seed, i), split=split_of(rng_seed, i, fraction))
        for i in range(n_samples)
    ]
    logger.info(
        f"Generating {n_samples} samples",
        extra={"dataset": {"experiment": experiment.name, "seed": rng_seed, "threads": threads}},
    )
    results = run_pool(
        lambda job: _generate_sample(experiment, grid, root, job.index, job.seed, job.split),
        jobs,
        threads,
    )

    records: list[SampleRecord] = []
    for job, result in zip(jobs, results, strict=True):
        if result.success and result.value is not None:
            records.append(result.value)
        else:
            records.append(
                SampleRecord(
                    index=job.index,
                    seed=job.seed,
                    status="failed",
                    split=job.split,
                    error_type=result.error_type,
                    error=result.error,
                    step=result.step,
                )
            )
    n_failed = sum(r.status == "failed" for r in records)

    manifest = DatasetManifest(
        tool_version=__version__,
        experiment=experiment.name,
        config_hash=experiment.config_hash(),
        full_hash=experiment.full_hash(),
        seed=rng_seed,
        n_requested=n_samples,
        n_samples=n_samples - n_failed,
        n_failed=n_failed,
        n_x=grid.n_x,
        dx=grid.dx,
        n_actuators=experiment.basis.n_actuators,
        n_steps=experiment.pde.n_steps,
        stride=experiment.dataset.stride,
        pde=experiment.pde,
        basis=experiment.basis,
        grf=experiment.grf_train,
        samples=records,
    )
    manifest.write(root)

    if n_failed > experiment.dataset.max_failure_fraction * n_samples:
        raise DatasetError(
            f"{n_failed} of {n_samples} samples failed, above the "
            f"{experiment.dataset.max_failure_fraction:.1%} limit"
        )
    if n_failed:
        logger.warning(f"{n_failed} samples failed and were skipped")
    logger.info(
        "Dataset written",
        extra={"dataset": {"root": str(root), "samples": manifest.n_samples, "failed": n_failed}},
    )
    return DatasetHandle(root=root, manifest=manifest)


@dataclass
class DatasetHandle:
    """Read access to a dataset directory."""

    root: Path
    manifest: DatasetManifest

    @classmethod
    def open(cls, root: str | Path) -> "DatasetHandle":
        path = Path(root)
        return cls(root=path, manifest=DatasetManifest.read(path))

    def __len__(self) -> int:
        return self.manifest.n_samples

    def check_compatible(self, experiment: ExperimentConfig, force: bool = False) -> None:
        """Refuse to combine with an experiment of a different physical setup."""
        expected = experiment.config_hash()
        if self.manifest.config_hash == expected:
            if self.manifest.full_hash != experiment.full_hash():
                logger.warning(
                    f"Dataset {self.root} was generated under different settings "
                    f"(full hash {self.manifest.full_hash[:12]}, "
                    f"experiment has {experiment.full_hash()[:12]})"
                )
            return

        message = (
            f"Dataset {self.root} was generated for config {self.manifest.config_hash[:12]}, "
            f"experiment has {expected[:12]}"
        )
        if not force:
            raise ArtifactMismatchError(message)
        logger.warning(f"{message}; continuing because force is set")

    def records(self, split: Split | None = None) -> list[SampleRecord]:
        return [
            r
            for r in self.manifest.samples
            if r.status == "ok" and (split is None or r.split == split)
        ]

    def indices(self, split: Split | None = None) -> list[int]:
        return [r.index for r in self.records(split)]

    def load(self, index: int) -> Trajectory:
        record = next((r for r in self.manifest.samples if r.index == index), None)
        if record is None or record.file is None:
            raise DatasetError(f"Sample {index} is not available in {self.root}")
        fields, amplitudes = read_trajectory(self.root / record.file)
        return Trajectory(
            fields=fields,
            amplitudes=amplitudes,
            pde=self.manifest.pde,
            dt=self.manifest.pde.dt,
            seed=record.seed,
            grf=self.manifest.grf,
        )

    def trajectories(self, split: Split | None = None) -> Iterator[Trajectory]:
        for index in self.indices(split):
            yield self.load(index)

    def transitions(self, split: Split | None = None) -> TransitionBatch:
        return TransitionBatch.concat(
            [to_transitions(t, self.manifest.stride) for t in self.trajectories(split)]
        )

    def windows(self, split: Split | None, steps: int) -> RolloutWindows:
        parts = [to_windows(t, self.manifest.stride, steps) for t in self.trajectories(split)]
        if not parts:
            raise DatasetError(f"No {split or 'any'} samples in {self.root}")
        return RolloutWindows(
            u0=np.concatenate([p.u0 for p in parts]),
            amps=np.concatenate([p.amps for p in parts]),
            targets=np.concatenate([p.targets for p in parts]),
            dt_op=parts[0].dt_op,
        )

    def terminal_fields(self, split: Split = "train") -> Array:
        """Final states of every trajectory in ``split``, shape (count, n_x)."""
        fields = [t.terminal for t in self.trajectories(split)]
        if not fields:
            raise DatasetError(f"No {split} samples in {self.root} to draw targets from")
        return np.stack(fields)
