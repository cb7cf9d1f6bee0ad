"""Minimal reverse-mode differentiation on numpy arrays."""

from .gradcheck import gradcheck, numerical_grad, relative_error
from .ops import (
    activate,
    avg_pool,
    batch_norm,
    conv1d,
    conv2d,
    cross_entropy,
    layer_norm,
    leaky_relu,
    linear,
    lstm_seq,
    max_pool2x2,
    normalize,
    pool,
    softmax,
    squared_error,
)
from .optim import OptimizerState, fans, rmsprop_step, xavier_init
from .tensor import DiffTensor, backward, concat, exp, getitem, log, no_grad, sigmoid, tanh

__all__ = [
    "DiffTensor", "backward", "no_grad", "concat", "getitem", "exp", "log", "sigmoid", "tanh",
    "conv2d", "conv1d", "pool", "max_pool2x2", "avg_pool", "normalize", "batch_norm",
    "layer_norm", "activate", "leaky_relu", "softmax", "linear", "lstm_seq", "cross_entropy",
    "squared_error", "OptimizerState", "rmsprop_step", "xavier_init", "fans",
    "gradcheck", "numerical_grad", "relative_error",
]
