"""Parameter-holding wrappers around the functional ops."""

from __future__ import annotations

import numpy as np

from . import ops
from .optim import xavier_init
from .tensor import DiffTensor


class Layer:
    def parameters(self) -> dict[str, DiffTensor]:
        return {}

    def buffers(self) -> dict[str, np.ndarray]:
        return {}


class Conv2d(Layer):
    def __init__(self, kh, kw, cin, cout, rng, dtype=np.float32, bias: bool = False):
        self.weight = xavier_init((kh, kw, cin, cout), rng, dtype)
        self.bias = DiffTensor(np.zeros(cout, dtype), requires_grad=True) if bias else None

    def __call__(self, x: DiffTensor) -> DiffTensor:
        return ops.conv2d(x, self.weight, self.bias, padding="same")

    def parameters(self):
        p = {"weight": self.weight}
        if self.bias is not None:
            p["bias"] = self.bias
        return p


class Conv1d(Layer):
    def __init__(self, k, cin, cout, rng, dtype=np.float32):
        self.weight = xavier_init((k, cin, cout), rng, dtype)
        self.bias = DiffTensor(np.zeros(cout, dtype), requires_grad=True)

    def __call__(self, x: DiffTensor) -> DiffTensor:
        return ops.conv1d(x, self.weight, self.bias)

    def parameters(self):
        return {"weight": self.weight, "bias": self.bias}


class Linear(Layer):
    def __init__(self, din, dout, rng, dtype=np.float32):
        self.weight = xavier_init((din, dout), rng, dtype)
        self.bias = DiffTensor(np.zeros(dout, dtype), requires_grad=True)

    def __call__(self, x: DiffTensor) -> DiffTensor:
        return ops.linear(x, self.weight, self.bias)

    def parameters(self):
        return {"weight": self.weight, "bias": self.bias}


class BatchNorm(Layer):
    """Batch normalisation with deferred running-moment updates.

    In train mode the batch statistics of the last call are held in
    ``pending`` until :meth:`commit` folds them into the running moments, so
    a forward pass alone never mutates model state.
    """

    def __init__(self, channels, dtype=np.float32, momentum: float = 0.99):
        self.gamma = DiffTensor(np.ones(channels, dtype), requires_grad=True)
        self.beta = DiffTensor(np.zeros(channels, dtype), requires_grad=True)
        self.running_mean = np.zeros(channels, dtype)
        self.running_var = np.ones(channels, dtype)
        self.momentum = momentum
        self.pending: tuple[np.ndarray, np.ndarray, int] | None = None

    def __call__(self, x: DiffTensor, training: bool) -> DiffTensor:
        if training:
            out, mu, var = ops.batch_norm(x, self.gamma, self.beta)
            self.pending = (mu, var, x.size // x.shape[-1])
            return out
        return ops.batch_norm(x, self.gamma, self.beta, self.running_mean, self.running_var)[0]

    def commit(self) -> None:
        if self.pending is None:
            return
        mu, var, count = self.pending
        unbiased = var * (count / max(count - 1, 1))
        m = self.momentum
        self.running_mean[...] = m * self.running_mean + (1 - m) * mu
        self.running_var[...] = m * self.running_var + (1 - m) * unbiased
        self.pending = None

    def parameters(self):
        return {"gamma": self.gamma, "beta": self.beta}

    def buffers(self):
        return {"running_mean": self.running_mean, "running_var": self.running_var}


class LayerNorm(Layer):
    def __init__(self, channels, dtype=np.float32):
        self.gamma = DiffTensor(np.ones(channels, dtype), requires_grad=True)
        self.beta = DiffTensor(np.zeros(channels, dtype), requires_grad=True)

    def __call__(self, x: DiffTensor) -> DiffTensor:
        return ops.layer_norm(x, self.gamma, self.beta)

    def parameters(self):
        return {"gamma": self.gamma, "beta": self.beta}


class LSTM(Layer):
    def __init__(self, din, hidden, rng, dtype=np.float32):
        self.w_ih = xavier_init((din, 4 * hidden), rng, dtype)
        self.w_hh = xavier_init((hidden, 4 * hidden), rng, dtype)
        self.bias = DiffTensor(np.zeros(4 * hidden, dtype), requires_grad=True)

    def __call__(self, x: DiffTensor) -> DiffTensor:
        return ops.lstm_seq(x, self.w_ih, self.w_hh, self.bias)

    def parameters(self):
        return {"w_ih": self.w_ih, "w_hh": self.w_hh, "bias": self.bias}
