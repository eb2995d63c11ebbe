"""Dataset manifest: provenance, counts and per-sample status."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field

from ..dsl.models import ControlBasisConfig, GRFConfig, PDEParams
from ..errors import DatasetError

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1


class SampleRecord(BaseModel):
    index: int
    seed: int
    status: Literal["ok", "failed"]
    split: Literal["train", "test"]
    file: str | None = None
    error_type: str | None = None
    error: str | None = None
    step: int | None = None


class DatasetManifest(BaseModel):
    """Everything needed to reload and audit a generated dataset."""

    format_version: int = MANIFEST_VERSION
    tool_version: str
    experiment: str
    config_hash: str
    full_hash: str
    seed: int
    n_requested: int
    n_samples: int = Field(..., description="Successfully generated trajectories")
    n_failed: int
    n_x: int
    dx: float
    n_actuators: int
    n_steps: int = Field(..., description="Solver steps per trajectory")
    stride: int
    pde: PDEParams
    basis: ControlBasisConfig
    grf: GRFConfig
    samples: list[SampleRecord] = Field(default_factory=list)

    def write(self, root: Path) -> Path:
        path = root / MANIFEST_NAME
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def read(cls, root: Path) -> "DatasetManifest":
        path = root / MANIFEST_NAME
        if not path.is_file():
            raise DatasetError(f"No {MANIFEST_NAME} in {root}")
        return cls.model_validate_json(path.read_text(encoding="utf-8"))
