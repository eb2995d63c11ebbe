"""Explicit feedback policy a = a_max·tanh(MLP([u; ξ]))."""

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..autodiff import MLP, Module, Tensor, concat, hidden_sizes, reshape, tanh
from ..errors import ShapeError
from ..numerics.types import Array, ControlAmplitudes, Field


@dataclass(frozen=True)
class ScenarioParams:
    """Problem parameters ξ fed to the policy next to the state.

    ``target`` is the tracked profile for terminal-tracking objectives; ``extra``
    holds any further scalar parameters. Both carry an optional leading batch axis.
    """

    target: Array | None = None
    extra: Array | None = None

    def features(self) -> Array | None:
        parts = [p for p in (self.target, self.extra) if p is not None]
        if not parts:
            return None
        return np.concatenate(parts, axis=-1)

    @property
    def n_features(self) -> int:
        feats = self.features()
        return 0 if feats is None else feats.shape[-1]

    def select(self, index: int) -> "ScenarioParams":
        """Single scenario ``index`` of a batch, keeping a batch axis of one."""
        return ScenarioParams(
            target=None if self.target is None else self.target[index : index + 1],
            extra=None if self.extra is None else self.extra[index : index + 1],
        )


class PolicyModel(Module):
    """SiLU MLP with a tanh projection onto the box |a_i| < a_max."""

    def __init__(
        self,
        n_x: int,
        n_features: int,
        n_actuators: int,
        width: int,
        depth: int,
        a_max: float,
        rng: np.random.Generator,
        init_scale: float = 1.0,
        input_scale: float = 1.0,
    ) -> None:
        self.n_x = n_x
        self.n_features = n_features
        self.n_actuators = n_actuators
        self.width = width
        self.depth = depth
        self.a_max = float(a_max)
        self.input_scale = float(input_scale)
        self.net = MLP(hidden_sizes(n_x + n_features, width, depth, n_actuators), "silu", rng)
        last = self.net.layers[-1]
        last.weight.data = last.weight.data * init_scale
        last.bias.data = last.bias.data * init_scale

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return [(f"net.{n}", p) for n, p in self.net.named_parameters()]

    def __call__(self, u: Tensor | Array, features: Tensor | Array | None = None) -> Tensor:
        u = u if isinstance(u, Tensor) else Tensor(u)
        single = u.ndim == 1
        if single:
            u = reshape(u, (1, u.shape[0]))
        if u.shape[-1] != self.n_x:
            raise ShapeError(f"Policy expects {self.n_x} state values, got {u.shape}")

        z = u * self.input_scale
        if self.n_features:
            if features is None:
                raise ShapeError(f"Policy expects {self.n_features} scenario features, got none")
            xi = features if isinstance(features, Tensor) else Tensor(features)
            if xi.ndim == 1:
                xi = reshape(xi, (1, xi.shape[0]))
            if xi.shape != (u.shape[0], self.n_features):
                raise ShapeError(
                    f"Scenario features {xi.shape} do not match ({u.shape[0]}, {self.n_features})"
                )
            z = concat([z, xi * self.input_scale], axis=-1)
        elif features is not None and features.ndim and features.shape[-1]:
            raise ShapeError("Policy was built without scenario features")

        amps = tanh(self.net(z)) * self.a_max
        return reshape(amps, (self.n_actuators,)) if single else amps

    def act(self, u: Field, scen: ScenarioParams) -> ControlAmplitudes:
        """Amplitudes for one state, evaluated off-tape as a batch of one."""
        feats = scen.features()
        if feats is not None and feats.ndim == 1:
            feats = feats[None, :]
        return self(np.asarray(u, dtype=np.float64)[None, :], feats).data[0]

    def spec(self) -> dict[str, Any]:
        return {
            "n_x": self.n_x,
            "n_features": self.n_features,
            "n_actuators": self.n_actuators,
            "width": self.width,
            "depth": self.depth,
            "a_max": self.a_max,
            "input_scale": self.input_scale,
        }

    @classmethod
    def from_spec(cls, spec: dict[str, Any]) -> "PolicyModel":
        return cls(
            int(spec["n_x"]),
            int(spec["n_features"]),
            int(spec["n_actuators"]),
            int(spec["width"]),
            int(spec["depth"]),
            float(spec["a_max"]),
            np.random.default_rng(0),
            input_scale=float(spec.get("input_scale", 1.0)),
        )


def policy_forward(policy: PolicyModel, u: Tensor | Array, scen: ScenarioParams) -> Tensor:
    """Embed [u; ξ], run the SiLU network and project onto the amplitude box."""
    return policy(u, scen.features())
