"""Closed-loop deployment on surrogate and solver plants, and the comparison table."""

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Literal, Protocol

import numpy as np

from .._version import __version__
from ..control.loss import curvature_density
from ..control.policy import PolicyModel, ScenarioParams
from ..control.scenarios import ScenarioSampler
from ..dsl.models import ExperimentConfig
from ..errors import SolverError
from ..numerics.basis import hold_amplitudes
from ..numerics.grid import Grid1D, build_grid
from ..numerics.seeding import derive_seed
from ..numerics.solvers import rollout_fdm
from ..numerics.trajectory import Trajectory
from ..numerics.types import Array, ControlAmplitudes, Field
from ..surrogate.integrate import rk4_step
from ..surrogate.model import OperatorModel
from .pool import run_pool
from .results import Result, with_solver_error_handling, with_timing_logging

logger = logging.getLogger(__name__)

CostKind = Literal["terminal_tracking", "curvature_integral"]
Controller = Callable[[Field, ScenarioParams], ControlAmplitudes]

COLUMNS = ("natural_fdm", "ctrl_tidon", "ctrl_fdm")


class Plant(Protocol):
    """System advanced by one control interval under held amplitudes."""

    name: str
    dt_control: float

    def advance(self, u: Field, amps: ControlAmplitudes) -> Field: ...


class SurrogatePlant:
    """One RK4 step of the operator per control interval."""

    name = "tidon"

    def __init__(self, operator: OperatorModel, dt_op: float) -> None:
        self.operator = operator
        self.dt_control = dt_op

    def advance(self, u: Field, amps: ControlAmplitudes) -> Field:
        out = rk4_step(self.operator, np.asarray(u)[None, :], np.asarray(amps)[None, :], self.dt_control)
        return out.data[0]


class FDMPlant:
    """``stride`` solver steps per control interval with the amplitudes held."""

    name = "fdm"

    def __init__(self, experiment: ExperimentConfig, grid: Grid1D | None = None) -> None:
        self.experiment = experiment
        self.grid = grid or build_grid(experiment)
        self.stride = experiment.dataset.stride
        self.dt_control = experiment.dt_op

    def advance(self, u: Field, amps: ControlAmplitudes) -> Field:
        held = hold_amplitudes(np.asarray(amps)[None, :], self.stride)
        traj = rollout_fdm(u, held, self.experiment.pde, self.experiment.basis, self.grid)
        return traj.terminal


def zero_controller(n_actuators: int) -> Controller:
    def control(u: Field, scen: ScenarioParams) -> ControlAmplitudes:
        return np.zeros(n_actuators)

    return control


def deploy_closed_loop(
    controller: Controller, plant: Plant, u0: Field, scen: ScenarioParams, n_steps: int
) -> Trajectory:
    """Feedback loop: at every control instant the controller reads the plant state.

    Raises:
        SolverError: A plant step failed; annotated with the control step index.
    """
    u = np.asarray(u0, dtype=np.float64)
    fields = [u]
    amplitudes = []
    for k in range(n_steps):
        a = np.asarray(controller(u, scen), dtype=np.float64)
        try:
            u = plant.advance(u, a)
        except SolverError as exc:
            raise exc.at_step(k) from exc
        amplitudes.append(a)
        fields.append(u)
    amps = np.stack(amplitudes) if amplitudes else np.zeros((0, 0))
    return Trajectory(fields=np.stack(fields), amplitudes=amps, dt=plant.dt_control)


def objective_value(traj: Trajectory, scen: ScenarioParams, kind: CostKind, grid: Grid1D) -> float:
    """Physical objective without penalties: Δx-weighted squared L² norms."""
    if kind == "terminal_tracking":
        if scen.target is None:
            raise ValueError("terminal_tracking objective needs a target")
        error = traj.terminal - np.asarray(scen.target).reshape(-1)
        return float(np.sum(error * error) * grid.dx)
    return float(np.sum(curvature_density(traj.fields[1:], grid)) * traj.dt)


def max_violation(traj: Trajectory, experiment: ExperimentConfig) -> float:
    """Largest violation of the amplitude bound or any affine constraint (0 if none)."""
    worst = 0.0
    if traj.amplitudes.size:
        worst = max(worst, float(np.max(np.abs(traj.amplitudes))) - experiment.basis.a_max)
    for c in experiment.loss.constraints:
        values = traj.fields[1:] if c.on == "state" else traj.amplitudes
        if values.size:
            worst = max(worst, float(np.max(c.coefficient * values - c.threshold)))
    return max(worst, 0.0)


@dataclass
class ScenarioRecord:
    index: int
    seed: int
    status: Literal["ok", "failed"] = "ok"
    natural_fdm: float | None = None
    ctrl_tidon: float | None = None
    ctrl_fdm: float | None = None
    max_violation: float | None = None
    runtime_s: float | None = None
    error: str | None = None


@dataclass
class ColumnStats:
    mean: float | None
    std: float | None
    median: float | None
    n: int


@dataclass
class ScenarioRun:
    """Everything produced for one scenario; trajectories feed the figures."""

    record: ScenarioRecord
    scen: ScenarioParams | None = None
    natural: Trajectory | None = None
    ctrl_tidon: Trajectory | None = None
    ctrl_fdm: Trajectory | None = None


def column_stats(values: list[float]) -> ColumnStats:
    """Mean, sample std (0 for a single value) and median."""
    if not values:
        return ColumnStats(None, None, None, 0)
    arr = np.asarray(values, dtype=np.float64)
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return ColumnStats(float(arr.mean()), std, float(np.median(arr)), int(arr.size))


def _ratio(num: float | None, den: float | None) -> float | None:
    if num is None or den is None or den == 0.0:
        return None
    return num / den


@dataclass
class EvalReport:
    experiment: str
    pde: str
    cost: CostKind
    config_hash: str
    records: list[ScenarioRecord]
    runs: dict[int, ScenarioRun] = field(default_factory=dict)

    @property
    def completed(self) -> list[ScenarioRecord]:
        return [r for r in self.records if r.status == "ok"]

    def column(self, name: str) -> ColumnStats:
        return column_stats([getattr(r, name) for r in self.completed])

    def ratios(self) -> dict[str, float | None]:
        natural = self.column("natural_fdm").mean
        tidon = self.column("ctrl_tidon").mean
        fdm = self.column("ctrl_fdm").mean
        over = _ratio(fdm, natural)
        gap = None if tidon is None or fdm is None else _ratio(abs(tidon - fdm), fdm)
        return {
            "ctrl_fdm_over_natural": over,
            "ctrl_tidon_over_natural": _ratio(tidon, natural),
            "curvature_reduction": None if over is None else 1.0 - over,
            "transfer_gap": gap,
        }

    def summary(self) -> dict[str, Any]:
        """JSON document the acceptance rules are evaluated against."""
        columns = {name: vars(self.column(name)) for name in COLUMNS}
        n_ok = len(self.completed)
        return {
            "experiment": self.experiment,
            "pde": self.pde,
            "cost": self.cost,
            "n_eval": len(self.records),
            "n_completed": n_ok,
            "n_failed": len(self.records) - n_ok,
            "columns": columns,
            "ratios": self.ratios(),
            "flags": {"single_scenario_std": n_ok == 1, "incomplete": n_ok < len(self.records)},
            "config_hash": self.config_hash,
            "tool_version": __version__,
        }


def _scenario(sampler: ScenarioSampler, eval_seed: int, index: int) -> tuple[int, Array, ScenarioParams]:
    seed = derive_seed(eval_seed, index)
    u0, scen = sampler.sample(seed, 1)
    return seed, u0[0], scen


def build_comparison(
    policy: PolicyModel,
    operator: OperatorModel,
    experiment: ExperimentConfig,
    n_eval: int,
    rng_seed: int,
    target_pool: Array | None = None,
    threads: int = 1,
    keep_runs: int = 0,
) -> EvalReport:
    """Natural (FDM), Controlled (TI-DON) and Controlled (FDM) objectives per scenario.

    Scenarios are drawn like policy-training scenarios but from ``rng_seed``;
    failed scenarios stay in the report as incomplete rows. Trajectories of
    the first ``keep_runs`` scenarios are retained for figures.
    """
    if n_eval < 1:
        raise ValueError(f"n_eval must be >= 1, got {n_eval}")
    operator.freeze()
    grid = build_grid(experiment)
    sampler = ScenarioSampler(experiment, grid, target_pool)
    surrogate = SurrogatePlant(operator, experiment.dt_op)
    solver = FDMPlant(experiment, grid)
    natural = zero_controller(experiment.basis.n_actuators)
    n_steps = experiment.horizon
    kind = experiment.loss.cost

    @with_timing_logging
    @with_solver_error_handling
    def evaluate_one(index: int) -> Result[ScenarioRun]:
        start = time.perf_counter()
        seed, u0, scen = _scenario(sampler, rng_seed, index)
        nat = deploy_closed_loop(natural, solver, u0, scen, n_steps)
        tidon = deploy_closed_loop(policy.act, surrogate, u0, scen, n_steps)
        fdm = deploy_closed_loop(policy.act, solver, u0, scen, n_steps)
        record = ScenarioRecord(
            index=index,
            seed=seed,
            natural_fdm=objective_value(nat, scen, kind, grid),
            ctrl_tidon=objective_value(tidon, scen, kind, grid),
            ctrl_fdm=objective_value(fdm, scen, kind, grid),
            max_violation=max(max_violation(tidon, experiment), max_violation(fdm, experiment)),
            runtime_s=time.perf_counter() - start,
        )
        if index >= keep_runs:
            return Result.ok(ScenarioRun(record))
        return Result.ok(ScenarioRun(record, scen, nat, tidon, fdm))

    results = run_pool(evaluate_one, list(range(n_eval)), threads)

    records: list[ScenarioRecord] = []
    runs: dict[int, ScenarioRun] = {}
    for index, result in enumerate(results):
        if result.success and result.value is not None:
            records.append(result.value.record)
            if result.value.natural is not None:
                runs[index] = result.value
        else:
            records.append(
                ScenarioRecord(
                    index=index,
                    seed=derive_seed(rng_seed, index),
                    status="failed",
                    error=f"{result.error_type}: {result.error}",
                )
            )
            logger.warning(f"Scenario {index} failed", extra={"scenario": {"error": result.error}})

    report = EvalReport(
        experiment=experiment.name,
        pde=experiment.pde.kind.value,
        cost=kind,
        config_hash=experiment.config_hash(),
        records=records,
        runs=runs,
    )
    logger.info("Comparison complete", extra={"summary": report.summary()})
    return report
