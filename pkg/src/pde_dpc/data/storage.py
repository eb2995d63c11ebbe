"""Binary trajectory records: fixed header then little-endian float64 payload."""

import struct
from pathlib import Path

import numpy as np

from ..errors import DatasetError
from ..numerics.types import Array

MAGIC = b"PDEDPCTR"
FORMAT_VERSION = 1

# magic, version, n_x, N_t, n_actuators
_HEADER = struct.Struct("<8sIIII")
_FLOAT = np.dtype("<f8")


def trajectory_filename(index: int) -> str:
    return f"traj_{index:06}.bin"


def write_trajectory(path: Path, fields: Array, amplitudes: Array) -> None:
    """Write fields (N_t + 1, n_x) then amplitudes (N_t, n) after the header."""
    n_t = amplitudes.shape[0]
    if fields.shape[0] != n_t + 1:
        raise DatasetError(f"{fields.shape[0]} fields do not match {n_t} amplitude rows")
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, fields.shape[1], n_t, amplitudes.shape[1])
    tmp = path.with_suffix(".tmp")
    with tmp.open("wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(fields, dtype=_FLOAT).tobytes())
        fh.write(np.ascontiguousarray(amplitudes, dtype=_FLOAT).tobytes())
    tmp.replace(path)


def read_trajectory(path: Path) -> tuple[Array, Array]:
    """Inverse of :func:`write_trajectory`; returns native-endian float64 copies."""
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise DatasetError(f"Trajectory file not found: {path}") from None
    if len(raw) < _HEADER.size:
        raise DatasetError(f"{path.name}: truncated header")
    magic, version, n_x, n_t, n_act = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DatasetError(f"{path.name}: not a trajectory record (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise DatasetError(f"{path.name}: unsupported format version {version}")

    n_fields = (n_t + 1) * n_x
    n_amps = n_t * n_act
    expected = _HEADER.size + (n_fields + n_amps) * _FLOAT.itemsize
    if len(raw) != expected:
        raise DatasetError(f"{path.name}: expected {expected} bytes, found {len(raw)}")

    payload = np.frombuffer(raw, dtype=_FLOAT, offset=_HEADER.size)
    fields = payload[:n_fields].reshape(n_t + 1, n_x).astype(np.float64)
    amplitudes = payload[n_fields:].reshape(n_t, n_act).astype(np.float64)
    return fields, amplitudes
