"""Define-by-run reverse-mode automatic differentiation over float64 arrays.

Operations executed while a :class:`Tape` is active are recorded in order;
``Tape.backward`` walks the recording in reverse and accumulates gradients into
every leaf tensor that requires them.

Example:
    >>> x = Tensor([3.0], requires_grad=True)
    >>> with Tape() as tape:
    ...     loss = reduce_sum(square(x))
    ...     tape.backward(loss)
    >>> x.grad
    array([6.])
"""

import contextvars
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from ..errors import ShapeError, TapeError

Array = npt.NDArray[np.float64]
BackwardFn = Callable[[Array], tuple[Array | None, ...]]

ElementwiseKind = Literal[
    "add", "sub", "mul", "square", "tanh", "silu", "relu", "scale", "negate"
]


class Tensor:
    """Dense float64 array that can take part in reverse-mode differentiation."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data: object, requires_grad: bool = False) -> None:
        self.data: Array = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Array | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> Array:
        return self.data.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def sum(self, axis: int | None = None) -> "Tensor":
        return reduce_sum(self, axis)

    def __add__(self, other: "Tensor | float | Array") -> "Tensor":
        return add(self, other)

    def __radd__(self, other: "Tensor | float | Array") -> "Tensor":
        return add(self, other)

    def __sub__(self, other: "Tensor | float | Array") -> "Tensor":
        return sub(self, other)

    def __rsub__(self, other: "Tensor | float | Array") -> "Tensor":
        return sub(_as_tensor(other), self)

    def __mul__(self, other: "Tensor | float | Array") -> "Tensor":
        if isinstance(other, int | float):
            return scale(self, float(other))
        return mul(self, other)

    def __rmul__(self, other: "Tensor | float | Array") -> "Tensor":
        return self.__mul__(other)

    def __truediv__(self, other: float) -> "Tensor":
        return scale(self, 1.0 / float(other))

    def __neg__(self) -> "Tensor":
        return negate(self)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


@dataclass
class Node:
    """One recorded operation: inputs, output and the rule mapping ḡ to input grads."""

    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    backward: BackwardFn


_ACTIVE_TAPE: contextvars.ContextVar["Tape | None"] = contextvars.ContextVar(
    "pde_dpc_active_tape", default=None
)


class Tape:
    """Ordered record of differentiable operations (one forward pass).

    A tape is bound to the current context while used as a context manager, so
    parallel workers each record on their own tape.
    """

    def __init__(self) -> None:
        self.nodes: list[Node] = []
        self._token: contextvars.Token["Tape | None"] | None = None

    def __enter__(self) -> "Tape":
        self._token = _ACTIVE_TAPE.set(self)
        return self

    def __exit__(self, *exc: object) -> None:
        if self._token is not None:
            _ACTIVE_TAPE.reset(self._token)
            self._token = None

    def record(self, node: Node) -> None:
        self.nodes.append(node)

    def backward(self, loss: Tensor) -> None:
        """Accumulate d(loss)/d(leaf) into ``leaf.grad`` for every recorded leaf."""
        if loss.size != 1:
            raise TapeError(f"backward requires a scalar loss, got shape {loss.shape}")

        end = next(
            (i for i in range(len(self.nodes) - 1, -1, -1) if self.nodes[i].output is loss),
            None,
        )
        if end is None:
            raise TapeError("loss is not on the tape")

        produced = {id(node.output) for node in self.nodes[: end + 1]}
        grads: dict[int, Array] = {id(loss): np.ones_like(loss.data)}
        leaves: dict[int, Tensor] = {}

        for node in reversed(self.nodes[: end + 1]):
            g = grads.pop(id(node.output), None)
            if g is None:
                continue
            for inp, ig in zip(node.inputs, node.backward(g), strict=True):
                if ig is None or not inp.requires_grad:
                    continue
                key = id(inp)
                grads[key] = grads[key] + ig if key in grads else ig
                if key not in produced:
                    leaves[key] = inp

        for key, leaf in leaves.items():
            g = grads[key]
            leaf.grad = g.copy() if leaf.grad is None else leaf.grad + g


def active_tape() -> Tape | None:
    return _ACTIVE_TAPE.get()


def backward(loss: Tensor) -> None:
    """Run the backward pass of the currently active tape."""
    tape = _ACTIVE_TAPE.get()
    if tape is None:
        raise TapeError("loss is not on the tape: no tape is active")
    tape.backward(loss)


def _as_tensor(value: "Tensor | float | int | Array") -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _emit(op: str, inputs: tuple[Tensor, ...], data: Array, rule: BackwardFn) -> Tensor:
    needs_grad = any(t.requires_grad for t in inputs)
    tape = _ACTIVE_TAPE.get()
    out = Tensor(data, requires_grad=needs_grad and tape is not None)
    if out.requires_grad and tape is not None:
        tape.record(Node(op=op, inputs=inputs, output=out, backward=rule))
    return out


def _broadcast_shape(a: tuple[int, ...], b: tuple[int, ...], op: str) -> tuple[int, ...]:
    # scalar-with-tensor, or trailing-axis (row) broadcast for bias terms
    if a == b:
        return a
    if int(np.prod(b)) == 1 and len(b) <= len(a):
        return a
    if int(np.prod(a)) == 1 and len(a) <= len(b):
        return b
    if len(b) < len(a) and a[len(a) - len(b) :] == b:
        return a
    if len(a) < len(b) and b[len(b) - len(a) :] == a:
        return b
    raise ShapeError(f"{op}: cannot combine shapes {a} and {b}")


def _unbroadcast(g: Array, shape: tuple[int, ...]) -> Array:
    if g.shape == shape:
        return g
    lead = g.ndim - len(shape)
    reduced = g.sum(axis=tuple(range(lead))) if lead > 0 else g
    keep = tuple(i for i, n in enumerate(shape) if n == 1 and reduced.shape[i] != 1)
    if keep:
        reduced = reduced.sum(axis=keep, keepdims=True)
    return reduced.reshape(shape)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of two rank-2 tensors."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions disagree for {a.shape} and {b.shape}")
    a_data, b_data = a.data, b.data

    def rule(g: Array) -> tuple[Array | None, ...]:
        return g @ b_data.T, a_data.T @ g

    return _emit("matmul", (a, b), a_data @ b_data, rule)


def add(a: "Tensor | float | Array", b: "Tensor | float | Array") -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a.shape, b.shape, "add")
    sa, sb = a.shape, b.shape
    return _emit(
        "add", (a, b), a.data + b.data, lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb))
    )


def sub(a: "Tensor | float | Array", b: "Tensor | float | Array") -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a.shape, b.shape, "sub")
    sa, sb = a.shape, b.shape
    return _emit(
        "sub", (a, b), a.data - b.data, lambda g: (_unbroadcast(g, sa), -_unbroadcast(g, sb))
    )


def mul(a: "Tensor | float | Array", b: "Tensor | float | Array") -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape(a.shape, b.shape, "mul")
    a_data, b_data = a.data, b.data

    def rule(g: Array) -> tuple[Array | None, ...]:
        return _unbroadcast(g * b_data, a_data.shape), _unbroadcast(g * a_data, b_data.shape)

    return _emit("mul", (a, b), a_data * b_data, rule)


def square(x: Tensor) -> Tensor:
    x_data = x.data
    return _emit("square", (x,), x_data * x_data, lambda g: (2.0 * x_data * g,))


def tanh(x: Tensor) -> Tensor:
    y = np.tanh(x.data)
    return _emit("tanh", (x,), y, lambda g: ((1.0 - y * y) * g,))


def sigmoid_array(x: Array) -> Array:
    return np.exp(-np.logaddexp(0.0, -x))


def silu(x: Tensor) -> Tensor:
    x_data = x.data
    s = sigmoid_array(x_data)
    return _emit("silu", (x,), x_data * s, lambda g: (s * (1.0 + x_data * (1.0 - s)) * g,))


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0.0
    return _emit("relu", (x,), np.where(mask, x.data, 0.0), lambda g: (g * mask,))


def scale(x: Tensor, factor: float) -> Tensor:
    return _emit("scale", (x,), x.data * factor, lambda g: (g * factor,))


def negate(x: Tensor) -> Tensor:
    return _emit("negate", (x,), -x.data, lambda g: (-g,))


_UNARY: dict[str, Callable[[Tensor], Tensor]] = {
    "square": square,
    "tanh": tanh,
    "silu": silu,
    "relu": relu,
    "negate": negate,
}

_BINARY: dict[str, Callable[[Tensor, Tensor], Tensor]] = {
    "add": add,
    "sub": sub,
    "mul": mul,
}


def apply_elementwise(
    x: Tensor,
    kind: ElementwiseKind,
    other: "Tensor | float | Array | None" = None,
    *,
    factor: float | None = None,
) -> Tensor:
    """Dispatch an elementwise operation by name."""
    if kind in _BINARY:
        if other is None:
            raise ShapeError(f"{kind}: binary operation needs a second operand")
        return _BINARY[kind](x, _as_tensor(other))
    if kind == "scale":
        if factor is None:
            raise ValueError("scale requires a factor")
        return scale(x, factor)
    if kind in _UNARY:
        return _UNARY[kind](x)
    raise ValueError(f"Unknown elementwise kind: {kind}")


def reduce_sum(x: Tensor, axis: int | None = None) -> Tensor:
    """Sum over one axis, or over every element when ``axis`` is None."""
    shape = x.shape
    if axis is None:
        return _emit(
            "sum", (x,), np.asarray(x.data.sum()), lambda g: (np.broadcast_to(g, shape).copy(),)
        )
    if not -x.ndim <= axis < x.ndim:
        raise ShapeError(f"reduce_sum: axis {axis} out of range for rank {x.ndim}")
    ax = axis % x.ndim
    return _emit(
        "sum",
        (x,),
        x.data.sum(axis=ax),
        lambda g: (np.broadcast_to(np.expand_dims(g, ax), shape).copy(),),
    )


def mean(x: Tensor) -> Tensor:
    return scale(reduce_sum(x), 1.0 / x.size)


def transpose(x: Tensor) -> Tensor:
    if x.ndim != 2:
        raise ShapeError(f"transpose expects a rank-2 tensor, got {x.shape}")
    return _emit("transpose", (x,), x.data.T.copy(), lambda g: (g.T,))


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    original = x.shape
    return _emit("reshape", (x,), x.data.reshape(tuple(shape)), lambda g: (g.reshape(original),))


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    """Concatenate along ``axis``; gradients are split back to each part."""
    parts = tuple(_as_tensor(t) for t in tensors)
    if not parts:
        raise ShapeError("concat needs at least one tensor")
    ax = axis % parts[0].ndim
    bounds = np.cumsum([p.shape[ax] for p in parts])[:-1]

    def rule(g: Array) -> tuple[Array | None, ...]:
        return tuple(np.split(g, bounds, axis=ax))

    return _emit("concat", parts, np.concatenate([p.data for p in parts], axis=ax), rule)


def all_finite(x: Tensor) -> bool:
    return bool(np.all(np.isfinite(x.data)))
