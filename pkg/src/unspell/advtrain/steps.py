"""Single optimisation steps for the adversarial and supervised modes."""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from ..errors import DivergenceError
from ..ndgrad import DiffTensor, OptimizerState, backward, cross_entropy, getitem, no_grad, rmsprop_step, softmax
from ..nets import ModelBundle, check_simplex, discriminator_forward
from .losses import d_loss, g_loss

FAKE_SIMPLEX_TOL = 1e-6


@dataclass
class OptStates:
    phi: OptimizerState = field(default_factory=OptimizerState)
    d: OptimizerState = field(default_factory=OptimizerState)

    @classmethod
    def with_lr(cls, lr: float) -> "OptStates":
        return cls(OptimizerState(lr=lr), OptimizerState(lr=lr))


@contextlib.contextmanager
def frozen(params: Mapping[str, DiffTensor]) -> Iterator[None]:
    """Treat ``params`` as constants inside the block (no gradient is accumulated for them)."""
    saved = {k: p.requires_grad for k, p in params.items()}
    for p in params.values():
        p.requires_grad = False
    try:
        yield
    finally:
        for k, p in params.items():
            p.requires_grad = saved[k]


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise DivergenceError(f"non-finite {what}: {value}")
    return value


def _as_images(images) -> np.ndarray:
    return images.data if isinstance(images, DiffTensor) else np.asarray(images)


def d_phase(bundle: ModelBundle, images, strings, opt: OptimizerState) -> float:
    """One update of D and W on corpus one-hots against detached recogniser softmaxes."""
    rec = bundle.recogniser
    with no_grad():
        fake = softmax(rec(_as_images(images), training=True), axis=1).data
    rec.discard()  # this forward must leave the recogniser untouched
    params = bundle.d_params()
    real = strings.data if isinstance(strings, DiffTensor) else np.asarray(strings)
    batch = np.concatenate([real.astype(fake.dtype, copy=False), fake])
    scores = discriminator_forward(batch, bundle)
    b = len(real)
    loss = d_loss(getitem(scores, slice(0, b)), getitem(scores, slice(b, None)))
    value = _finite(float(loss.data), "d_loss")
    backward(loss)
    rmsprop_step(params, opt)
    for p in params.values():
        p.zero_grad()
    return value


def g_phase(bundle: ModelBundle, images, opt: OptimizerState) -> float:
    """One update of the recogniser through the frozen discriminator and embedding."""
    rec = bundle.recogniser
    params = bundle.phi_params()
    with frozen(bundle.d_params()):
        y = softmax(rec(_as_images(images), training=True), axis=1)
        check_simplex(y.data, tol=FAKE_SIMPLEX_TOL)
        loss = g_loss(discriminator_forward(y, bundle))
        value = float(loss.data)
        if not math.isfinite(value):
            rec.discard()
            raise DivergenceError(f"non-finite g_loss: {value}")
        backward(loss)
    rmsprop_step(params, opt)
    rec.commit()
    for p in params.values():
        p.zero_grad()
    return value


def train_step(bundle: ModelBundle, image_batch, string_batch, opt_states: OptStates) -> tuple[float, float]:
    """D-phase then recogniser phase on independent (unpaired) batches; returns ``(d_loss, g_loss)``."""
    dl = d_phase(bundle, image_batch, string_batch, opt_states.d)
    gl = g_phase(bundle, image_batch, opt_states.phi)
    return dl, gl


def supervised_step(bundle: ModelBundle, image_batch, aligned_labels: np.ndarray, opt_state: OptimizerState) -> float:
    """Cross-entropy on aligned labels (``B x n`` indices, null positions included); updates the recogniser only."""
    rec = bundle.recogniser
    params = bundle.phi_params()
    logits = rec(_as_images(image_batch), training=True)
    labels = np.asarray(aligned_labels)
    if labels.shape != (logits.shape[0], logits.shape[2]):
        rec.discard()
        raise ValueError(f"labels shape {labels.shape} does not match logits {logits.shape}")
    loss = cross_entropy(logits, labels, axis=1)
    value = float(loss.data)
    if not math.isfinite(value):
        rec.discard()
        raise DivergenceError(f"non-finite supervised loss: {value}")
    backward(loss)
    rmsprop_step(params, opt_state)
    rec.commit()
    for p in params.values():
        p.zero_grad()
    return value
