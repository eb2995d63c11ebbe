"""Dense layers, parameter containers and the adaptive-moment optimizer."""

import logging
from collections.abc import Callable, Sequence
from typing import Literal

import numpy as np

from ..errors import ShapeError
from .tensor import Array, Tensor, matmul, relu, silu, tanh

logger = logging.getLogger(__name__)

Activation = Literal["tanh", "silu", "relu", "identity"]

ACTIVATIONS: dict[str, Callable[[Tensor], Tensor]] = {
    "tanh": tanh,
    "silu": silu,
    "relu": relu,
    "identity": lambda x: x,
}


class Module:
    """Anything that owns named parameters."""

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        raise NotImplementedError

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def set_trainable(self, trainable: bool) -> None:
        for p in self.parameters():
            p.requires_grad = trainable

    def state_arrays(self) -> dict[str, Array]:
        """Copies of every parameter, keyed by name, in registration order."""
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_arrays(self, arrays: dict[str, Array]) -> None:
        """Overwrite parameters in place; names and shapes must match exactly."""
        own = dict(self.named_parameters())
        if set(own) != set(arrays):
            missing = sorted(set(own) - set(arrays))
            extra = sorted(set(arrays) - set(own))
            raise ShapeError(f"Parameter names differ: missing={missing}, unexpected={extra}")
        for name, p in own.items():
            value = np.asarray(arrays[name], dtype=np.float64)
            if value.shape != p.shape:
                raise ShapeError(f"Parameter {name}: expected {p.shape}, got {value.shape}")
            p.data = value.copy()


class Linear(Module):
    """y = x·W + b with uniform fan-in initialization."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator) -> None:
        bound = 1.0 / np.sqrt(in_features)
        self.weight = Tensor(
            rng.uniform(-bound, bound, size=(in_features, out_features)), requires_grad=True
        )
        self.bias = Tensor(rng.uniform(-bound, bound, size=(out_features,)), requires_grad=True)

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return [("weight", self.weight), ("bias", self.bias)]

    def __call__(self, x: Tensor) -> Tensor:
        return matmul(x, self.weight) + self.bias


class MLP(Module):
    """Fully connected network; activation after every layer except the last."""

    def __init__(
        self,
        sizes: Sequence[int],
        activation: Activation,
        rng: np.random.Generator,
    ) -> None:
        if len(sizes) < 2:
            raise ValueError("MLP needs at least input and output sizes")
        self.sizes = tuple(int(s) for s in sizes)
        self.activation = activation
        self._act = ACTIVATIONS[activation]
        self.layers = [Linear(a, b, rng) for a, b in zip(self.sizes[:-1], self.sizes[1:], strict=False)]

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return [
            (f"layers.{i}.{name}", p)
            for i, layer in enumerate(self.layers)
            for name, p in layer.named_parameters()
        ]

    def __call__(self, x: Tensor) -> Tensor:
        if x.shape[-1] != self.sizes[0]:
            raise ShapeError(f"MLP expects {self.sizes[0]} input features, got {x.shape}")
        for layer in self.layers[:-1]:
            x = self._act(layer(x))
        return self.layers[-1](x)


def hidden_sizes(n_in: int, width: int, depth: int, n_out: int) -> list[int]:
    return [n_in, *([width] * depth), n_out]


class Adam:
    """First-order adaptive-moment optimizer with optional global-norm clipping."""

    def __init__(
        self,
        params: Sequence[Tensor],
        lr: float = 1e-3,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        grad_clip: float | None = None,
    ) -> None:
        self.params = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.grad_clip = grad_clip
        self.t = 0
        self._m = [np.zeros_like(p.data) for p in self.params]
        self._v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def grad_norm(self) -> float:
        return float(
            np.sqrt(sum(float(np.sum(p.grad * p.grad)) for p in self.params if p.grad is not None))
        )

    def step(self) -> None:
        self.t += 1
        factor = 1.0
        if self.grad_clip is not None:
            norm = self.grad_norm()
            if norm > self.grad_clip:
                factor = self.grad_clip / norm
                logger.debug("Clipping gradient", extra={"grad_norm": norm})
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, m, v in zip(self.params, self._m, self._v, strict=True):
            if p.grad is None:
                continue
            g = p.grad * factor
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p.data = p.data - self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
