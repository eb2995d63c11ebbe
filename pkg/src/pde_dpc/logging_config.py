"""JSONL log formatting and handler wiring for the command-line tools."""

import json
import logging
import sys
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

import numpy as np

_STANDARD_ATTRS = frozenset(
    {
        "name",
        "msg",
        "args",
        "created",
        "filename",
        "funcName",
        "levelname",
        "levelno",
        "lineno",
        "module",
        "msecs",
        "message",
        "pathname",
        "process",
        "processName",
        "relativeCreated",
        "thread",
        "threadName",
        "taskName",
        "exc_info",
        "exc_text",
        "stack_info",
        "getMessage",
    }
)


class JSONLFormatter(logging.Formatter):
    """Custom formatter that outputs logs in JSONL format."""

    def format(self, record: logging.LogRecord) -> str:
        log_obj: dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, tz=UTC).isoformat(),
            "level": record.levelname,
            "name": record.name,
            "message": record.getMessage(),
        }

        extra_data: dict[str, Any] = {}
        for key, value in record.__dict__.items():
            if key not in _STANDARD_ATTRS and not key.startswith("_"):
                extra_data[key] = self._serialize_value(value)

        if extra_data:
            log_obj["data"] = extra_data
        if record.exc_info:
            log_obj["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_obj, ensure_ascii=False)

    def _serialize_value(self, value: Any) -> Any:
        """Serialize a value according to JSONL format rules."""
        # Containers are walked so numpy scalars inside stay numeric
        if isinstance(value, dict):
            return {str(k): self._serialize_value(v) for k, v in value.items()}
        if isinstance(value, list | tuple):
            return [self._serialize_value(v) for v in value]

        if isinstance(value, bool | int | float | str) or value is None:
            return value
        if isinstance(value, np.generic):
            return value.item()
        if isinstance(value, np.ndarray):
            return value.tolist()

        if hasattr(value, "model_dump") and callable(value.model_dump):
            try:
                return value.model_dump(mode="json")
            except Exception:
                return str(value)

        return str(value)


def setup_logging(level: str | int = "INFO", log_file: str | Path | None = None) -> None:
    """Configure console logging plus an optional JSONL file capturing DEBUG.

    Args:
        level: Console level
        log_file: Path of a JSONL log file; parent directories are created
    """
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter(fmt="%(levelname)s - %(message)s"))

    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.addHandler(console_handler)
    root_logger.setLevel(level)

    if log_file is not None:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, mode="a", encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(JSONLFormatter())
        root_logger.addHandler(file_handler)
        root_logger.setLevel(logging.DEBUG)
