"""Operator-training datasets: generation, binary storage and transitions."""

from .dataset import DatasetHandle, generate_dataset, simulate_sample, split_of
from .manifest import DatasetManifest, SampleRecord
from .storage import read_trajectory, trajectory_filename, write_trajectory
from .transitions import RolloutWindows, TransitionBatch, coarsen, to_transitions, to_windows

__all__ = [
    "DatasetHandle",
    "DatasetManifest",
    "RolloutWindows",
    "SampleRecord",
    "TransitionBatch",
    "coarsen",
    "generate_dataset",
    "read_trajectory",
    "simulate_sample",
    "split_of",
    "to_transitions",
    "to_windows",
    "trajectory_filename",
    "write_trajectory",
]
