"""Declarative experiment configuration.

Every constant an experiment needs (PDE, grid, random fields, actuators,
dataset, networks, loss, evaluation gates) is a validated pydantic model, so a
config file is checked field by field before any computation starts.

Example:
    >>> from pde_dpc.dsl import load_experiment
    >>> exp = load_experiment("configs/heat_desk.yaml")
    >>> exp.pde.n_steps, exp.dt_op
    (400, 0.01)
"""

import hashlib
import json
from enum import StrEnum
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PDEKind(StrEnum):
    HEAT = "heat"
    BURGERS = "burgers"
    FISHER_KPP = "fisher_kpp"


class BoundaryCondition(StrEnum):
    DIRICHLET0 = "dirichlet0"
    PERIODIC = "periodic"
    NEUMANN0 = "neumann0"


ALLOWED_BC: dict[PDEKind, BoundaryCondition] = {
    PDEKind.HEAT: BoundaryCondition.DIRICHLET0,
    PDEKind.BURGERS: BoundaryCondition.PERIODIC,
    PDEKind.FISHER_KPP: BoundaryCondition.NEUMANN0,
}


class PDEParams(BaseModel):
    """Physical coefficients, boundary condition and time discretization."""

    model_config = ConfigDict(frozen=True)

    kind: PDEKind
    bc: BoundaryCondition
    alpha: float = Field(0.0, ge=0.0, description="Diffusivity")
    r: float = Field(0.0, ge=0.0, description="Reaction rate (Fisher-KPP)")
    dt: float = Field(1e-3, gt=0.0, description="Solver time step")
    T: float = Field(..., gt=0.0, description="Horizon")
    conservative: bool = Field(
        False, description="Burgers: use the conservative Godunov-flux update"
    )
    newton_tol: float = Field(1e-10, gt=0.0)
    newton_max_iter: int = Field(50, gt=0)

    @model_validator(mode="after")
    def check_consistency(self) -> "PDEParams":
        if ALLOWED_BC[self.kind] != self.bc:
            raise ValueError(
                f"{self.kind.value} requires bc={ALLOWED_BC[self.kind].value}, got {self.bc.value}"
            )
        ratio = self.T / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"T/dt must be an integer, got {ratio}")
        return self

    @property
    def n_steps(self) -> int:
        return round(self.T / self.dt)


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    dx: float = Field(1e-2, gt=0.0, le=0.5)


class GRFConfig(BaseModel):
    """Zero-mean Gaussian random field with an RBF covariance."""

    model_config = ConfigDict(frozen=True)

    length_scale: float = Field(..., gt=0.0)
    variance: float = Field(..., gt=0.0)
    jitter: float | None = Field(
        None, ge=0.0, description="Diagonal regularization; default 1e-10·variance"
    )
    taper: bool = Field(False, description="Multiply samples by sin(πx) so endpoints vanish")
    periodic_projection: bool = Field(
        False, description="Remove the endpoint mismatch so samples are periodic-compatible"
    )

    @model_validator(mode="after")
    def check_jitter(self) -> "GRFConfig":
        if self.jitter is not None and self.jitter > 1e-6 * self.variance:
            raise ValueError("jitter must not exceed 1e-6·variance")
        return self

    @property
    def effective_jitter(self) -> float:
        return self.jitter if self.jitter is not None else 1e-10 * self.variance


class ExcitationConfig(BaseModel):
    """Distribution constants of the perturbed-sinusoid training signals."""

    model_config = ConfigDict(frozen=True)

    amplitude_low: float = Field(0.3, ge=0.0, le=1.0)
    amplitude_high: float = Field(1.0, ge=0.0, le=1.0)
    frequency_low: float = Field(0.5, ge=0.0, description="Cycles per horizon")
    frequency_high: float = Field(3.0, ge=0.0)
    noise_fraction: float = Field(0.05, ge=0.0, description="Noise std as a fraction of a_max")

    @model_validator(mode="after")
    def check_ranges(self) -> "ExcitationConfig":
        if self.amplitude_low > self.amplitude_high:
            raise ValueError("amplitude_low must not exceed amplitude_high")
        if self.frequency_low > self.frequency_high:
            raise ValueError("frequency_low must not exceed frequency_high")
        return self


class ControlBasisConfig(BaseModel):
    """Gaussian actuators: centers, spread and amplitude bound."""

    model_config = ConfigDict(frozen=True)

    n_actuators: int = Field(..., gt=0)
    mu: tuple[float, ...]
    sigma: float = Field(..., gt=0.0)
    a_max: float = Field(..., gt=0.0)
    excitation: ExcitationConfig = ExcitationConfig()

    @model_validator(mode="after")
    def check_centers(self) -> "ControlBasisConfig":
        if len(self.mu) != self.n_actuators:
            raise ValueError(f"Expected {self.n_actuators} centers, got {len(self.mu)}")
        if any(not 0.0 < m < 1.0 for m in self.mu):
            raise ValueError("Actuator centers must lie strictly inside (0, 1)")
        if any(b <= a for a, b in zip(self.mu, self.mu[1:], strict=False)):
            raise ValueError("Actuator centers must be sorted and distinct")
        return self


class DatasetConfig(BaseModel):
    n_samples: int = Field(3000, ge=0)
    stride: int = Field(10, ge=1, description="Solver steps per operator step")
    train_fraction: float = Field(0.8, gt=0.0, le=1.0)
    max_failure_fraction: float = Field(0.01, ge=0.0, le=1.0)
    seed: int = 0


class OptimizerConfig(BaseModel):
    learning_rate: float = Field(1e-3, gt=0.0)
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    epsilon: float = Field(1e-8, gt=0.0)
    grad_clip: float | None = Field(None, gt=0.0)


class ArchitectureConfig(BaseModel):
    width: int = Field(128, gt=0)
    depth: int = Field(3, ge=1, description="Hidden layers per network")
    latent_dim: int = Field(64, gt=0, description="Number of latent basis functions p")
    activation: Literal["tanh", "silu", "relu"] = "tanh"


class OperatorTrainConfig(BaseModel):
    architecture: ArchitectureConfig = ArchitectureConfig()
    optimizer: OptimizerConfig = OptimizerConfig()
    batch_size: int = Field(256, gt=0)
    epochs: int = Field(200, ge=0)
    rollout_loss_steps: int = Field(1, ge=1)
    curriculum: bool = Field(False, description="Ramp rollout steps 1→rollout_loss_steps")
    std_floor: float = Field(
        1e-3, gt=0.0, description="Per-point std floor relative to the largest std"
    )
    seed: int = 0


class AffineConstraint(BaseModel):
    """coefficient · value − threshold ≤ 0, applied pointwise."""

    name: str
    on: Literal["state", "control"]
    coefficient: float = 1.0
    threshold: float


class DPCLossConfig(BaseModel):
    cost: Literal["terminal_tracking", "curvature_integral"]
    stage_weight: float = Field(1.0, ge=0.0)
    terminal_weight: float = Field(1.0, ge=0.0)
    state_penalty_weight: float = Field(100.0, ge=0.0)
    control_penalty_weight: float = Field(100.0, ge=0.0)
    control_weight: float = Field(0.0, ge=0.0, description="Weight of Σ a_i² per step")
    constraints: list[AffineConstraint] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_active_cost(self) -> "DPCLossConfig":
        if self.cost == "terminal_tracking" and self.terminal_weight <= 0.0:
            raise ValueError("terminal_tracking needs terminal_weight > 0")
        if self.cost == "curvature_integral" and self.stage_weight <= 0.0:
            raise ValueError("curvature_integral needs stage_weight > 0")
        return self

    @property
    def state_constraints(self) -> list[AffineConstraint]:
        return [c for c in self.constraints if c.on == "state"]

    @property
    def control_constraints(self) -> list[AffineConstraint]:
        return [c for c in self.constraints if c.on == "control"]


class PolicyConfig(BaseModel):
    width: int = Field(256, gt=0)
    depth: int = Field(3, ge=1)
    optimizer: OptimizerConfig = OptimizerConfig()
    batch_size: int = Field(32, gt=0, description="Scenarios per minibatch")
    batches_per_epoch: int = Field(4, gt=0)
    epochs: int = Field(300, ge=0)
    init_scale: float = Field(
        1.0, ge=0.0, description="Multiplier on the output layer at initialization"
    )
    seed: int = 0


class AcceptanceRule(BaseModel):
    """Single acceptance check over the evaluation summary document.

    Fields:
        name: Label printed when the rule fails
        path: JSONPath expression selecting a value from the summary
        op: Operator name (le, lt, ge, gt, equals, exists, between)
        expected: Threshold or expected value
        all_: Logical AND composition of multiple rules
        any_: Logical OR composition of multiple rules
        not_: Logical NOT negation of a rule

    Example:
        >>> rule = AcceptanceRule(
        ...     name="heat-ratio",
        ...     path="$.ratios.ctrl_fdm_over_natural",
        ...     op="le",
        ...     expected=0.05,
        ... )
    """

    name: str | None = None
    path: str | None = None
    op: str = ""
    expected: Any = None

    all_: list["AcceptanceRule"] | None = Field(None, alias="all")
    any_: list["AcceptanceRule"] | None = Field(None, alias="any")
    not_: "AcceptanceRule | None" = Field(None, alias="not")

    model_config = ConfigDict(populate_by_name=True)

    @property
    def label(self) -> str:
        return self.name or f"{self.path} {self.op} {self.expected}"


class EvaluationConfig(BaseModel):
    n_eval: int = Field(50, ge=0)
    seed: int = 1_000_003
    figures: int = Field(3, ge=0, description="Scenarios rendered as SVG panels")
    acceptance: list[AcceptanceRule] = Field(default_factory=list)


class ExperimentConfig(BaseModel):
    """Complete description of one PDE control experiment."""

    name: str
    pde: PDEParams
    grid: GridSpec = GridSpec()
    basis: ControlBasisConfig
    grf_train: GRFConfig
    grf_policy_ic: GRFConfig
    target_source: Literal["none", "grf", "dataset"] = "none"
    grf_target: GRFConfig | None = None
    dataset: DatasetConfig = DatasetConfig()
    operator: OperatorTrainConfig = OperatorTrainConfig()
    policy: PolicyConfig = PolicyConfig()
    loss: DPCLossConfig
    evaluation: EvaluationConfig = EvaluationConfig()
    output_dir: str = "runs"

    @field_validator("name")
    @classmethod
    def check_not_empty(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("Field cannot be empty or whitespace only")
        return v

    @model_validator(mode="after")
    def check_experiment(self) -> "ExperimentConfig":
        if self.pde.n_steps % self.dataset.stride != 0:
            raise ValueError(
                f"dataset.stride={self.dataset.stride} must divide T/dt={self.pde.n_steps}"
            )
        if self.target_source == "grf" and self.grf_target is None:
            raise ValueError("target_source=grf requires grf_target")
        needs_target = self.loss.cost == "terminal_tracking"
        if needs_target and self.target_source == "none":
            raise ValueError("terminal_tracking cost needs a target_source")
        if not needs_target and self.target_source != "none":
            raise ValueError(f"{self.loss.cost} does not use targets; set target_source=none")
        return self

    @property
    def dt_op(self) -> float:
        return self.pde.dt * self.dataset.stride

    @property
    def horizon(self) -> int:
        """Operator (control) steps per horizon."""
        return self.pde.n_steps // self.dataset.stride

    @property
    def uses_target(self) -> bool:
        return self.target_source != "none"

    @property
    def periodic(self) -> bool:
        return self.pde.bc == BoundaryCondition.PERIODIC

    def config_hash(self) -> str:
        """Hash of the physical setup shared by every artifact of this experiment."""
        payload = {
            "pde": self.pde.model_dump(mode="json"),
            "grid": self.grid.model_dump(mode="json"),
            "basis": self.basis.model_dump(mode="json"),
            "grf_train": self.grf_train.model_dump(mode="json"),
            "stride": self.dataset.stride,
        }
        return _digest(payload)

    def full_hash(self) -> str:
        return _digest(self.model_dump(mode="json", by_alias=True))


def _digest(payload: dict[str, Any]) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
