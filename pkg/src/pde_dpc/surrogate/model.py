"""Dual-branch DeepONet returning ∂u/∂t on a fixed grid."""

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..autodiff import MLP, Module, Tensor, hidden_sizes, matmul, reshape, transpose
from ..dsl.models import ArchitectureConfig
from ..errors import ShapeError
from ..numerics.types import Array


@dataclass(frozen=True)
class Normalizer:
    """Per-point state standardization, amplitude scaling and output rate scale.

    Attributes:
        mean: Per-point state mean, shape (n_x,)
        std: Per-point state std (floored), shape (n_x,)
        amp_scale: Divisor applied to amplitudes (a_max)
        rate_scale: Per-point scale of ∂u/∂t (floored), shape (n_x,)
    """

    mean: Array
    std: Array
    amp_scale: float
    rate_scale: Array

    @classmethod
    def fit(
        cls, u_now: Array, u_next: Array, dt_op: float, amp_scale: float, std_floor: float = 1e-3
    ) -> "Normalizer":
        """Statistics of training transitions; floors are relative to the largest std."""
        states = np.concatenate([u_now, u_next])
        rates = (u_next - u_now) / dt_op
        return cls(
            mean=states.mean(axis=0),
            std=_floored(states.std(axis=0), std_floor),
            amp_scale=float(amp_scale),
            rate_scale=_floored(rates.std(axis=0), std_floor),
        )

    @classmethod
    def identity(cls, n_x: int, amp_scale: float = 1.0) -> "Normalizer":
        return cls(np.zeros(n_x), np.ones(n_x), float(amp_scale), np.ones(n_x))

    def normalize(self, u: Array) -> Array:
        return (u - self.mean) / self.std

    def denormalize(self, z: Array) -> Array:
        return z * self.std + self.mean

    def arrays(self) -> dict[str, Array]:
        return {
            "normalizer.mean": self.mean,
            "normalizer.std": self.std,
            "normalizer.amp_scale": np.array([self.amp_scale]),
            "normalizer.rate_scale": self.rate_scale,
        }

    @classmethod
    def from_arrays(cls, arrays: dict[str, Array]) -> "Normalizer":
        return cls(
            mean=arrays["normalizer.mean"],
            std=arrays["normalizer.std"],
            amp_scale=float(arrays["normalizer.amp_scale"][0]),
            rate_scale=arrays["normalizer.rate_scale"],
        )


def _floored(std: Array, floor: float) -> Array:
    top = float(std.max()) if std.size else 0.0
    if top <= 0.0:
        return np.ones_like(std)
    return np.maximum(std, floor * top)


class OperatorModel(Module):
    """G_θ(u, a)(x_i) = Σ_j b^u_j(u)·b^a_j(a)·t_j(x_i), rescaled to physical rates.

    The state and control branches each emit p coefficients; the trunk maps a
    grid coordinate to p basis values. On a fixed grid the trunk is a constant
    (n_x, p) matrix once the model is frozen.
    """

    def __init__(
        self,
        grid_x: Array,
        n_actuators: int,
        arch: ArchitectureConfig,
        normalizer: Normalizer,
        rng: np.random.Generator,
    ) -> None:
        self.grid_x = np.asarray(grid_x, dtype=np.float64)
        self.n_x = self.grid_x.shape[0]
        self.n_actuators = n_actuators
        self.arch = arch
        self.normalizer = normalizer
        p = arch.latent_dim
        self.state_branch = MLP(hidden_sizes(self.n_x, arch.width, arch.depth, p), arch.activation, rng)
        self.control_branch = MLP(
            hidden_sizes(n_actuators, arch.width, arch.depth, p), arch.activation, rng
        )
        self.trunk = MLP(hidden_sizes(1, arch.width, arch.depth, p), arch.activation, rng)
        self.bias = Tensor(np.zeros(1), requires_grad=True)
        self._trunk_cache: Tensor | None = None

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return [
            *((f"state_branch.{n}", p) for n, p in self.state_branch.named_parameters()),
            *((f"control_branch.{n}", p) for n, p in self.control_branch.named_parameters()),
            *((f"trunk.{n}", p) for n, p in self.trunk.named_parameters()),
            ("bias", self.bias),
        ]

    @property
    def frozen(self) -> bool:
        return self._trunk_cache is not None

    def freeze(self) -> "OperatorModel":
        """Stop parameter gradients and precompute the trunk on the grid."""
        self.set_trainable(False)
        self._trunk_cache = self.trunk_matrix(cached=False)
        return self

    def trunk_matrix(self, cached: bool = True) -> Tensor:
        """Trunk outputs at every grid point, shape (n_x, p)."""
        if cached and self._trunk_cache is not None:
            return self._trunk_cache
        return self.trunk(Tensor(self.grid_x[:, None]))

    def __call__(self, u: Tensor | Array, amps: Tensor | Array) -> Tensor:
        """Predicted ∂u/∂t; accepts (n_x,) / (n,) or batched (B, n_x) / (B, n)."""
        u = u if isinstance(u, Tensor) else Tensor(u)
        amps = amps if isinstance(amps, Tensor) else Tensor(amps)
        single = u.ndim == 1
        if single:
            u = reshape(u, (1, u.shape[0]))
        if amps.ndim == 1:
            amps = reshape(amps, (1, amps.shape[0]))
        if u.shape[-1] != self.n_x or amps.shape[-1] != self.n_actuators:
            raise ShapeError(
                f"Operator expects ({self.n_x},) states and ({self.n_actuators},) amplitudes, "
                f"got {u.shape} and {amps.shape}"
            )
        if u.shape[0] != amps.shape[0]:
            raise ShapeError(f"Batch sizes differ: states {u.shape}, amplitudes {amps.shape}")

        norm = self.normalizer
        z_u = (u - norm.mean) * (1.0 / norm.std)
        z_a = amps * (1.0 / norm.amp_scale)
        coefficients = self.state_branch(z_u) * self.control_branch(z_a)
        rate = (matmul(coefficients, transpose(self.trunk_matrix())) + self.bias) * norm.rate_scale
        return reshape(rate, (self.n_x,)) if single else rate

    def spec(self) -> dict[str, Any]:
        return {
            "n_x": self.n_x,
            "n_actuators": self.n_actuators,
            "architecture": self.arch.model_dump(mode="json"),
        }

    def checkpoint_arrays(self) -> dict[str, Array]:
        return {"grid_x": self.grid_x, **self.normalizer.arrays(), **self.state_arrays()}

    @classmethod
    def from_checkpoint(cls, spec: dict[str, Any], arrays: dict[str, Array]) -> "OperatorModel":
        arrays = dict(arrays)
        grid_x = arrays.pop("grid_x")
        normalizer = Normalizer.from_arrays(arrays)
        params = {k: v for k, v in arrays.items() if not k.startswith("normalizer.")}
        model = cls(
            grid_x,
            int(spec["n_actuators"]),
            ArchitectureConfig.model_validate(spec["architecture"]),
            normalizer,
            np.random.default_rng(0),
        )
        model.load_state_arrays(params)
        return model
