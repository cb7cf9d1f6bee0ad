"""Central finite-difference checks for DiffTensor ops."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .tensor import DiffTensor, backward


def numerical_grad(fn: Callable[[], float], arr: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central differences of scalar ``fn()`` w.r.t. every element of ``arr`` (mutated in place, restored)."""
    grad = np.zeros_like(arr, dtype=np.float64)
    flat = arr.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        up = fn()
        flat[i] = orig - eps
        down = fn()
        flat[i] = orig
        gflat[i] = (up - down) / (2 * eps)
    return grad


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    denom = np.linalg.norm(a) + np.linalg.norm(b)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(a - b) / denom)


def gradcheck(fn: Callable[..., DiffTensor], inputs: Sequence[DiffTensor], eps: float = 1e-6,
              seed: int = 0) -> float:
    """Max relative error between backprop and finite differences over ``inputs``.

    The output of ``fn(*inputs)`` is contracted with a fixed random tensor so
    every output element contributes to the checked scalar. Inputs must be
    float64 and tracked.
    """
    out = fn(*inputs)
    proj = np.random.default_rng(seed).standard_normal(out.shape)

    def scalar() -> float:
        return float((fn(*inputs).data * proj).sum())

    for t in inputs:
        t.zero_grad()
    loss = (fn(*inputs) * DiffTensor(proj)).sum()
    backward(loss)
    worst = 0.0
    for t in inputs:
        if not t.requires_grad:
            continue
        num = numerical_grad(scalar, t.data, eps)
        ana = t.grad if t.grad is not None else np.zeros_like(t.data)
        worst = max(worst, relative_error(ana, num))
    return worst
