"""CSV and JSON exports of training curves and evaluation reports."""

import csv
import json
from collections.abc import Iterable, Sequence
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any

from .._version import __version__
from .evaluation import COLUMNS, EvalReport

REPORT_COLUMNS = (
    "index",
    "seed",
    "status",
    "natural_fdm",
    "ctrl_tidon",
    "ctrl_fdm",
    "max_violation",
    "runtime_s",
    "error",
)

SUMMARY_COLUMNS = (
    "pde",
    "natural_fdm_mean",
    "natural_fdm_std",
    "ctrl_tidon_mean",
    "ctrl_tidon_std",
    "ctrl_fdm_mean",
    "ctrl_fdm_std",
    "natural_fdm_median",
    "ctrl_tidon_median",
    "ctrl_fdm_median",
    "n_completed",
    "n_failed",
    "single_scenario_std",
    "config_hash",
    "tool_version",
)


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(header), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in header})
    return path


def write_curve_csv(path: str | Path, records: Sequence[Any], config_hash: str) -> Path:
    """One row per epoch, fields of the epoch records plus provenance."""
    rows = [asdict(r) if is_dataclass(r) else dict(r) for r in records]
    fields = list(rows[0]) if rows else ["epoch", "loss", "best_loss"]
    for row in rows:
        row.update(config_hash=config_hash, tool_version=__version__)
    return _write_rows(Path(path), [*fields, "config_hash", "tool_version"], rows)


def write_report_csv(path: str | Path, report: EvalReport) -> Path:
    rows = [
        {**asdict(r), "config_hash": report.config_hash, "tool_version": __version__}
        for r in report.records
    ]
    return _write_rows(Path(path), [*REPORT_COLUMNS, "config_hash", "tool_version"], rows)


def summary_row(report: EvalReport) -> dict[str, Any]:
    doc = report.summary()
    row: dict[str, Any] = {"pde": report.pde}
    for name in COLUMNS:
        stats = doc["columns"][name]
        row[f"{name}_mean"] = stats["mean"]
        row[f"{name}_std"] = stats["std"]
        row[f"{name}_median"] = stats["median"]
    row.update(
        n_completed=doc["n_completed"],
        n_failed=doc["n_failed"],
        single_scenario_std=doc["flags"]["single_scenario_std"],
        config_hash=report.config_hash,
        tool_version=__version__,
    )
    return row


def write_summary_csv(path: str | Path, report: EvalReport) -> Path:
    return _write_rows(Path(path), SUMMARY_COLUMNS, [summary_row(report)])


def write_summary_json(path: str | Path, report: EvalReport) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
