"""Tests for CSV/JSON exports and scenario figures."""

import csv
import json
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from pde_dpc import __version__
from pde_dpc.control.train import build_policy
from pde_dpc.dsl.models import ExperimentConfig
from pde_dpc.numerics import Trajectory
from pde_dpc.numerics.grid import build_grid
from pde_dpc.runtime.evaluation import EvalReport, ScenarioRecord, ScenarioRun, build_comparison
from pde_dpc.runtime.figures import render_scenario
from pde_dpc.runtime.report import (
    REPORT_COLUMNS,
    SUMMARY_COLUMNS,
    summary_row,
    write_curve_csv,
    write_report_csv,
    write_summary_csv,
    write_summary_json,
)
from tests.fixtures import make_operator


def _read(path: Path) -> list[dict[str, str]]:
    with path.open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def report() -> EvalReport:
    records = [
        ScenarioRecord(index=0, seed=11, natural_fdm=2.0, ctrl_tidon=0.5, ctrl_fdm=0.4, runtime_s=0.1),
        ScenarioRecord(index=1, seed=12, natural_fdm=4.0, ctrl_tidon=0.7, ctrl_fdm=0.6, runtime_s=0.1),
        ScenarioRecord(index=2, seed=13, status="failed", error="convergence: step 3: newton"),
    ]
    return EvalReport("tiny-heat", "heat", "terminal_tracking", "f" * 64, records)


def test_curve_csv(tmp_path: Path) -> None:
    """Test epoch rows keep their fields and gain provenance columns."""
    path = write_curve_csv(
        tmp_path / "curves" / "operator.csv",
        [{"epoch": 0, "loss": 1.5, "best_loss": 1.5}, {"epoch": 1, "loss": 0.25, "best_loss": 0.25}],
        config_hash="abc",
    )
    rows = _read(path)
    assert list(rows[0]) == ["epoch", "loss", "best_loss", "config_hash", "tool_version"]
    assert rows[1]["loss"] == "0.25"
    assert rows[1]["tool_version"] == __version__


def test_empty_curve_csv_has_header(tmp_path: Path) -> None:
    """Test a run with no epochs still writes a header."""
    path = write_curve_csv(tmp_path / "empty.csv", [], config_hash="abc")
    assert path.read_text(encoding="utf-8").splitlines() == [
        "epoch,loss,best_loss,config_hash,tool_version"
    ]


def test_report_csv(tmp_path: Path, report: EvalReport) -> None:
    """Test one row per scenario with failed rows left blank."""
    rows = _read(write_report_csv(tmp_path / "report.csv", report))
    assert list(rows[0]) == [*REPORT_COLUMNS, "config_hash", "tool_version"]
    assert [r["status"] for r in rows] == ["ok", "ok", "failed"]
    assert rows[2]["ctrl_fdm"] == ""
    assert rows[2]["error"] == "convergence: step 3: newton"
    assert float(rows[0]["natural_fdm"]) == 2.0


def test_summary_row(report: EvalReport) -> None:
    """Test the summary row aggregates completed scenarios only."""
    row = summary_row(report)
    assert set(row) == set(SUMMARY_COLUMNS)
    assert row["natural_fdm_mean"] == pytest.approx(3.0)
    assert row["natural_fdm_std"] == pytest.approx(np.sqrt(2.0))
    assert row["ctrl_fdm_median"] == pytest.approx(0.5)
    assert (row["n_completed"], row["n_failed"]) == (2, 1)
    assert row["single_scenario_std"] is False


def test_summary_csv_and_json(tmp_path: Path, report: EvalReport) -> None:
    """Test the summary exports agree with the in-memory document."""
    rows = _read(write_summary_csv(tmp_path / "summary.csv", report))
    assert len(rows) == 1
    assert list(rows[0]) == list(SUMMARY_COLUMNS)
    assert rows[0]["pde"] == "heat"

    doc = json.loads(write_summary_json(tmp_path / "out" / "summary.json", report).read_text("utf-8"))
    assert doc == json.loads(json.dumps(report.summary()))
    assert doc["ratios"]["ctrl_fdm_over_natural"] == pytest.approx(0.5 / 3.0)
    assert doc["flags"]["incomplete"] is True


def test_render_scenario_writes_svg(tmp_path: Path, heat_experiment: ExperimentConfig) -> None:
    """Test a kept scenario renders to an SVG file."""
    grid = build_grid(heat_experiment)
    policy = build_policy(heat_experiment, grid.n_x, np.random.default_rng(0))
    result = build_comparison(
        policy, make_operator(heat_experiment), heat_experiment, 1, rng_seed=3, keep_runs=1
    )
    path = render_scenario(tmp_path / "figs" / "scenario_0.svg", result.runs[0], grid, "terminal_tracking")
    assert path.exists()
    assert path.read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_render_scenario_without_target(tmp_path: Path, heat_experiment: ExperimentConfig) -> None:
    """Test a tracking run whose scenario carries no target still renders."""
    grid = build_grid(heat_experiment)
    policy = build_policy(heat_experiment, grid.n_x, np.random.default_rng(0))
    result = build_comparison(
        policy, make_operator(heat_experiment), heat_experiment, 1, rng_seed=3, keep_runs=1
    )
    run = replace(result.runs[0], scen=None)
    path = render_scenario(tmp_path / "scenario_0.svg", run, grid, "terminal_tracking")
    assert path.exists()


def test_render_burgers_curvature_scenario(tmp_path: Path, burgers_experiment: ExperimentConfig) -> None:
    """Test a curvature-suppression run, which has no target field, renders."""
    grid = build_grid(burgers_experiment)
    n_steps, n = burgers_experiment.horizon, burgers_experiment.basis.n_actuators
    fields = np.sin(2 * np.pi * grid.x)[None, :] * np.linspace(1.0, 0.5, n_steps + 1)[:, None]
    traj = Trajectory(fields=fields, amplitudes=np.zeros((n_steps, n)), dt=burgers_experiment.dt_op)
    run = ScenarioRun(ScenarioRecord(index=0, seed=0), None, traj, traj, traj)
    path = render_scenario(tmp_path / "scenario_0.svg", run, grid, "curvature_integral")
    assert path.exists()


def test_render_scenario_without_trajectories(tmp_path: Path, heat_experiment: ExperimentConfig) -> None:
    """Test a record-only run cannot be plotted."""
    run = ScenarioRun(ScenarioRecord(index=4, seed=0))
    with pytest.raises(ValueError, match="Scenario 4 has no trajectories to plot"):
        render_scenario(tmp_path / "x.svg", run, build_grid(heat_experiment), "terminal_tracking")
    assert not (tmp_path / "x.svg").exists()
