"""Least-squares adversarial losses (targets 1 for corpus strings, 0 for predictions)."""

from __future__ import annotations

from ..ndgrad import DiffTensor, squared_error
from ..ndgrad.tensor import as_tensor


def d_loss(real_scores, fake_scores) -> DiffTensor:
    """``0.5 * mean[(D(real) - 1)^2 + D(fake)^2]``."""
    return (squared_error(as_tensor(real_scores), 1.0) + squared_error(as_tensor(fake_scores), 0.0)) * 0.5


def g_loss(fake_scores) -> DiffTensor:
    """``0.5 * mean[(D(fake) - 1)^2]``."""
    return squared_error(as_tensor(fake_scores), 1.0) * 0.5
