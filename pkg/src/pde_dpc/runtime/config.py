"""Runtime settings read from environment variables."""

import os
from typing import Literal

from pydantic import BaseModel, Field, field_validator

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR"]


class RuntimeSettings(BaseModel):
    """Process-wide defaults that do not belong in an experiment config."""

    out_dir: str | None = Field(None, description="Output root overriding experiment.output_dir")
    threads: int = Field(1, description="Default worker count for parallel sample work")
    log_level: LogLevel = Field("INFO", description="Default log level")

    @field_validator("threads")
    @classmethod
    def check_positive_threads(cls, v: int) -> int:
        """Ensure the worker count is a positive integer."""
        if v <= 0:
            raise ValueError("threads must be a positive integer")
        return v

    @field_validator("out_dir")
    @classmethod
    def check_not_blank(cls, v: str | None) -> str | None:
        if v is not None and not v.strip():
            raise ValueError("Field cannot be empty or whitespace only")
        return v


def load_runtime_settings(prefix: str = "PDE_DPC") -> RuntimeSettings:
    """
    Load runtime settings from environment variables.

    Optional variables:
        - {PREFIX}_OUT: Output root for every artifact
        - {PREFIX}_THREADS: Worker count (default: 1)
        - {PREFIX}_LOG_LEVEL: DEBUG, INFO, WARNING or ERROR (default: INFO)

    Args:
        prefix: Prefix for environment variables.

    Returns:
        RuntimeSettings: Validated settings.

    Raises:
        ValueError: If a variable is malformed.

    Example:
        >>> import os
        >>> os.environ["PDE_DPC_THREADS"] = "4"
        >>> load_runtime_settings().threads
        4
    """
    out_dir = os.getenv(f"{prefix}_OUT") or None

    threads_str = os.getenv(f"{prefix}_THREADS")
    threads = 1
    if threads_str:
        try:
            threads = int(threads_str)
        except ValueError:
            raise ValueError(
                f"Environment variable {prefix}_THREADS must be an integer, got '{threads_str}'"
            ) from None

    level = (os.getenv(f"{prefix}_LOG_LEVEL") or "INFO").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
        raise ValueError(
            f"Environment variable {prefix}_LOG_LEVEL must be one of DEBUG, INFO, WARNING, ERROR, "
            f"got '{level}'"
        )

    return RuntimeSettings(out_dir=out_dir, threads=threads, log_level=level)  # type: ignore[arg-type]
