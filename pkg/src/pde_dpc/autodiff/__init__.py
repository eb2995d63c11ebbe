"""Reverse-mode automatic differentiation and small neural-network layers."""

from .gradcheck import check_gradients, max_relative_error, numerical_gradient
from .nn import MLP, Adam, Linear, Module, hidden_sizes
from .tensor import (
    Tape,
    Tensor,
    active_tape,
    add,
    all_finite,
    apply_elementwise,
    backward,
    concat,
    matmul,
    mean,
    mul,
    negate,
    reduce_sum,
    relu,
    reshape,
    scale,
    silu,
    square,
    sub,
    tanh,
    transpose,
)

__all__ = [
    "Adam",
    "Linear",
    "MLP",
    "Module",
    "Tape",
    "Tensor",
    "active_tape",
    "add",
    "all_finite",
    "apply_elementwise",
    "backward",
    "check_gradients",
    "concat",
    "hidden_sizes",
    "matmul",
    "max_relative_error",
    "mean",
    "mul",
    "negate",
    "numerical_gradient",
    "reduce_sum",
    "relu",
    "reshape",
    "scale",
    "silu",
    "square",
    "sub",
    "tanh",
    "transpose",
]
