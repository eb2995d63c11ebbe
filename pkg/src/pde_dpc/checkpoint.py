"""Model checkpoints: magic, JSON header, then a little-endian float64 blob.

Layout::

    b"PDEDPCCK" | uint32 header length | header JSON (utf-8) | float64 payload

Arrays are stored back to back in header order, so a load reproduces every
parameter bit for bit.
"""

import logging
import struct
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, Field

from ._version import __version__
from .errors import ArtifactMismatchError
from .numerics.types import Array

logger = logging.getLogger(__name__)

MAGIC = b"PDEDPCCK"
FORMAT_VERSION = 1

_LENGTH = struct.Struct("<I")
_FLOAT = np.dtype("<f8")

CheckpointKind = Literal["operator", "policy"]


class TensorEntry(BaseModel):
    name: str
    shape: list[int]


class CheckpointHeader(BaseModel):
    kind: CheckpointKind
    format_version: int = FORMAT_VERSION
    tool_version: str = __version__
    experiment: str
    config_hash: str
    full_hash: str
    spec: dict[str, Any] = Field(default_factory=dict, description="Architecture and metadata")
    tensors: list[TensorEntry] = Field(default_factory=list)


def save_checkpoint(path: str | Path, header: CheckpointHeader, arrays: dict[str, Array]) -> Path:
    """Write ``arrays`` (in insertion order) under ``header``; tensor entries are filled in."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = header.model_copy(
        update={"tensors": [TensorEntry(name=k, shape=list(v.shape)) for k, v in arrays.items()]}
    )
    encoded = header.model_dump_json().encode("utf-8")
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(_LENGTH.pack(len(encoded)))
        fh.write(encoded)
        for value in arrays.values():
            fh.write(np.ascontiguousarray(value, dtype=_FLOAT).tobytes())
    tmp.replace(path)
    return path


def read_header(path: str | Path) -> CheckpointHeader:
    header, _ = _split(Path(path))
    return header


def load_checkpoint(
    path: str | Path, kind: CheckpointKind | None = None
) -> tuple[CheckpointHeader, dict[str, Array]]:
    """Inverse of :func:`save_checkpoint`.

    Raises:
        ArtifactMismatchError: Missing file, foreign format, wrong kind or size.
    """
    path = Path(path)
    header, raw = _split(path)
    if kind is not None and header.kind != kind:
        raise ArtifactMismatchError(f"{path.name} holds a {header.kind} model, expected {kind}")

    counts = [int(np.prod(entry.shape, dtype=np.int64)) for entry in header.tensors]
    if sum(counts) * _FLOAT.itemsize != len(raw):
        raise ArtifactMismatchError(f"{path.name}: payload size does not match its header")

    arrays: dict[str, Array] = {}
    offset = 0
    for entry, count in zip(header.tensors, counts, strict=True):
        chunk = np.frombuffer(raw, dtype=_FLOAT, count=count, offset=offset * _FLOAT.itemsize)
        arrays[entry.name] = chunk.reshape(entry.shape).astype(np.float64)
        offset += count
    return header, arrays


def _split(path: Path) -> tuple[CheckpointHeader, bytes]:
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise ArtifactMismatchError(f"Checkpoint not found: {path}") from None
    if raw[: len(MAGIC)] != MAGIC:
        raise ArtifactMismatchError(f"{path.name} is not a checkpoint")
    start = len(MAGIC) + _LENGTH.size
    (length,) = _LENGTH.unpack_from(raw, len(MAGIC))
    header = CheckpointHeader.model_validate_json(raw[start : start + length])
    if header.format_version != FORMAT_VERSION:
        raise ArtifactMismatchError(f"{path.name}: unsupported format version {header.format_version}")
    return header, raw[start + length :]


def check_config_hash(
    header: CheckpointHeader, expected: str, force: bool = False, full_hash: str | None = None
) -> None:
    """Refuse a checkpoint of another physical setup; warn when only other settings differ."""
    if header.config_hash != expected:
        message = (
            f"{header.kind} checkpoint was trained for config {header.config_hash[:12]}, "
            f"experiment has {expected[:12]}"
        )
        if not force:
            raise ArtifactMismatchError(message)
        logger.warning(f"{message}; continuing because force is set")
        return
    if full_hash is not None and header.full_hash != full_hash:
        logger.warning(
            f"{header.kind} checkpoint was written under different settings "
            f"(full hash {header.full_hash[:12]}, experiment has {full_hash[:12]})"
        )

