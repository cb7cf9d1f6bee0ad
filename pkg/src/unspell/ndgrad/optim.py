from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .tensor import DiffTensor


@dataclass
class OptimizerState:
    """RMSProp moving mean-square accumulators, keyed by parameter name."""

    lr: float = 1e-3
    decay: float = 0.9
    eps: float = 1e-8
    accumulators: dict[str, np.ndarray] = field(default_factory=dict)

    def config(self) -> dict:
        return {"lr": self.lr, "decay": self.decay, "eps": self.eps}


def rmsprop_step(params: Mapping[str, DiffTensor], state: OptimizerState) -> None:
    """Apply one RMSProp update in place to every parameter that holds a gradient.

    acc <- decay*acc + (1-decay)*g^2;  p <- p - lr*g/(sqrt(acc)+eps)
    """
    for name, p in params.items():
        acc = state.accumulators.get(name)
        if acc is None:
            acc = np.zeros_like(p.data)
            state.accumulators[name] = acc
        elif acc.shape != p.shape:
            raise ValueError(f"optimizer state for {name!r} has shape {acc.shape}, parameter has {p.shape}")
        g = p.grad
        if g is None:
            acc *= state.decay
            continue
        acc *= state.decay
        acc += (1.0 - state.decay) * g * g
        p.data -= (state.lr * g / (np.sqrt(acc) + state.eps)).astype(p.dtype, copy=False)


def fans(shape: tuple[int, ...]) -> tuple[int, int]:
    """(fan_in, fan_out) for dense ``(in, out)`` or conv ``(*kernel, in, out)`` shapes."""
    if len(shape) < 2:
        raise ValueError(f"cannot infer fans for shape {shape}")
    receptive = int(np.prod(shape[:-2])) if len(shape) > 2 else 1
    return shape[-2] * receptive, shape[-1] * receptive


def xavier_init(shape, rng_seed, dtype=np.float32, requires_grad: bool = True) -> DiffTensor:
    """Glorot-uniform tensor in +-sqrt(6/(fan_in+fan_out)).

    ``rng_seed`` may be an int or a ``numpy.random.Generator``.
    """
    shape = tuple(int(s) for s in shape)
    fan_in, fan_out = fans(shape)
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    data = rng.uniform(-bound, bound, size=shape).astype(dtype)
    return DiffTensor(data, requires_grad=requires_grad)
