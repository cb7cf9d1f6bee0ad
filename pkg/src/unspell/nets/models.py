"""Recogniser, character embedding and discriminator."""

from __future__ import annotations

import copy

import numpy as np

from ..errors import ContractError
from ..ndgrad import DiffTensor, layers, ops, xavier_init
from ..ndgrad.tensor import as_tensor, matmul, reduce_mean, reshape, transpose
from ..textcorpus import Alphabet
from .config import POOL_FACTOR, DiscriminatorConfig, RecogniserConfig

HEIGHT = 32
SIMPLEX_TOL = 1e-4


def _collect(prefix: str, layer: layers.Layer, params: dict, bufs: dict) -> None:
    for k, v in layer.parameters().items():
        params[f"{prefix}.{k}"] = v
    for k, v in layer.buffers().items():
        bufs[f"{prefix}.{k}"] = v


class Recogniser:
    """Fully-convolutional image-to-logits network (optionally with a residual skip-RNN)."""

    def __init__(self, config: RecogniserConfig, rng: np.random.Generator, dtype=np.float32):
        self.config = config
        c = config
        self.convs: list[layers.Conv2d] = []
        self.norms: list[layers.BatchNorm] = []
        cin = c.channels
        for _ in range(c.blocks * c.convs_per_block):
            self.convs.append(layers.Conv2d(c.kernel, c.kernel, cin, c.filters, rng, dtype))
            self.norms.append(layers.BatchNorm(c.filters, dtype))
            cin = c.filters
        self.rnn = self.rnn_proj = None
        if c.skip_rnn:
            self.rnn = layers.LSTM(c.feature_dim, c.skip_rnn, rng, dtype)
            self.rnn_proj = layers.Linear(c.skip_rnn, c.feature_dim, rng, dtype)
        self.out = layers.Linear(c.feature_dim, c.K, rng, dtype)

    def named(self) -> tuple[dict[str, DiffTensor], dict[str, np.ndarray]]:
        params, bufs = {}, {}
        per = self.config.convs_per_block
        for i, (conv, bn) in enumerate(zip(self.convs, self.norms)):
            tag = f"phi.block{i // per}.conv{i % per}"
            _collect(tag, conv, params, bufs)
            _collect(tag + ".bn", bn, params, bufs)
        if self.rnn is not None:
            _collect("phi.rnn", self.rnn, params, bufs)
            _collect("phi.rnn_proj", self.rnn_proj, params, bufs)
        _collect("phi.out", self.out, params, bufs)
        return params, bufs

    def features(self, images, training: bool) -> DiffTensor:
        """Conv stack then height average: ``B x n x D``."""
        x = as_tensor(images)
        c = self.config
        if x.ndim != 4 or x.shape[1] != HEIGHT or x.shape[3] != c.channels or x.shape[2] % POOL_FACTOR:
            raise ContractError(
                f"recogniser expects B x {HEIGHT} x (n*{POOL_FACTOR}) x {c.channels} images, got {x.shape}")
        x = DiffTensor(x.data.astype(self.out.weight.dtype, copy=False)) if not x.requires_grad else x
        for i, (conv, bn) in enumerate(zip(self.convs, self.norms)):
            x = ops.leaky_relu(bn(conv(x), training), c.leaky_slope)
            if i % c.convs_per_block == c.convs_per_block - 1:
                x = ops.max_pool2x2(x)
        x = ops.avg_pool(x, axis=1)  # B x 1 x n x D
        return reshape(x, (x.shape[0], x.shape[2], x.shape[3]))

    def skip_rnn(self, features: DiffTensor) -> DiffTensor:
        if self.rnn is None:
            raise ContractError("skip-RNN is disabled in this configuration")
        return features + self.rnn_proj(self.rnn(features))

    def __call__(self, images, training: bool = False) -> DiffTensor:
        f = self.features(images, training)
        if self.rnn is not None:
            f = self.skip_rnn(f)
        logits = self.out(f)  # 1x1 projection per position: B x n x K
        return transpose(logits, (0, 2, 1))

    def commit(self) -> None:
        """Fold batch statistics from the last training forward into the running moments."""
        for bn in self.norms:
            bn.commit()

    def discard(self) -> None:
        for bn in self.norms:
            bn.pending = None


class Discriminator:
    """Stack of same-padded 1-D convolutions over embedded columns, projected and averaged."""

    def __init__(self, config: DiscriminatorConfig, rng: np.random.Generator, dtype=np.float32):
        self.config = config
        c = config
        self.convs: list[layers.Conv1d] = []
        self.norms: list[layers.LayerNorm] = []
        cin = c.embed_dim
        for _ in range(c.layers):
            self.convs.append(layers.Conv1d(c.kernel, cin, c.filters, rng, dtype))
            self.norms.append(layers.LayerNorm(c.filters, dtype))
            cin = c.filters
        self.out = layers.Linear(c.filters, 1, rng, dtype)

    def named(self) -> dict[str, DiffTensor]:
        params, bufs = {}, {}
        for i, (conv, ln) in enumerate(zip(self.convs, self.norms)):
            _collect(f"d.layer{i}.conv", conv, params, bufs)
            _collect(f"d.layer{i}.ln", ln, params, bufs)
        _collect("d.out", self.out, params, bufs)
        return params

    def score_map(self, embedded: DiffTensor) -> DiffTensor:
        """Per-position scores before averaging: ``B x n`` from ``B x n x d`` embeddings."""
        x = embedded
        for conv, ln in zip(self.convs, self.norms):
            x = ops.leaky_relu(ln(conv(x)), self.config.leaky_slope)
        s = self.out(x)
        return reshape(s, s.shape[:-1])


class ModelBundle:
    """Recogniser, discriminator and character embedding trained together."""

    def __init__(self, rec_config: RecogniserConfig, disc_config: DiscriminatorConfig,
                 alphabet: Alphabet, seed: int = 0, dtype=np.float32):
        if rec_config.K != alphabet.K or disc_config.K != alphabet.K:
            raise ContractError(f"configs disagree with alphabet size K={alphabet.K}")
        self.rec_config = rec_config
        self.disc_config = disc_config
        self.alphabet = alphabet
        self.seed = seed
        ss = np.random.SeedSequence(seed)
        r_phi, r_d, r_w = (np.random.default_rng(s) for s in ss.spawn(3))
        self.recogniser = Recogniser(rec_config, r_phi, dtype)
        self.discriminator = Discriminator(disc_config, r_d, dtype)
        self.W = xavier_init((alphabet.K, disc_config.embed_dim), r_w, dtype)

    # -- parameter groups
    def phi_params(self) -> dict[str, DiffTensor]:
        return self.recogniser.named()[0]

    def d_params(self) -> dict[str, DiffTensor]:
        """Discriminator parameters plus the embedding (updated together)."""
        p = dict(self.discriminator.named())
        p["W"] = self.W
        return p

    def buffers(self) -> dict[str, np.ndarray]:
        return self.recogniser.named()[1]

    def state(self) -> dict[str, np.ndarray]:
        """Every persistent array, in a fixed order."""
        out = {k: v.data for k, v in self.phi_params().items()}
        out.update(self.buffers())
        out.update({k: v.data for k, v in self.d_params().items()})
        return out

    def load_state(self, arrays: dict[str, np.ndarray]) -> None:
        target = self.state()
        if set(arrays) != set(target):
            missing = sorted(set(target) - set(arrays))
            extra = sorted(set(arrays) - set(target))
            raise ContractError(f"state mismatch: missing {missing[:3]}, unexpected {extra[:3]}")
        for k, dst in target.items():
            src = np.asarray(arrays[k])
            if src.shape != dst.shape:
                raise ContractError(f"{k}: shape {src.shape} != {dst.shape}")
            dst[...] = src

    def clone(self) -> "ModelBundle":
        return copy.deepcopy(self)

    def astype(self, dtype) -> "ModelBundle":
        other = self.clone()
        for t in list(other.phi_params().values()) + list(other.d_params().values()):
            t.data = t.data.astype(dtype)
        for bn in other.recogniser.norms:
            bn.running_mean = bn.running_mean.astype(dtype)
            bn.running_var = bn.running_var.astype(dtype)
        return other

    def zero_grad(self) -> None:
        for t in list(self.phi_params().values()) + list(self.d_params().values()):
            t.zero_grad()


# ---------------------------------------------------------------------------
# functional entry points


def recogniser_forward(images, bundle: ModelBundle, mode: str = "eval") -> DiffTensor:
    """Logits ``B x K x n``. ``mode='train'`` normalises with batch statistics."""
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    return bundle.recogniser(images, training=mode == "train")


def skip_rnn(features: DiffTensor, bundle: ModelBundle) -> DiffTensor:
    return bundle.recogniser.skip_rnn(as_tensor(features))


def check_simplex(y: np.ndarray, axis: int = 1, tol: float = SIMPLEX_TOL) -> None:
    if y.size and (y.min() < -tol or np.abs(y.sum(axis=axis) - 1.0).max() > tol):
        raise ContractError("discriminator input columns must lie on the probability simplex")


def _embed_cl(y: DiffTensor, W: DiffTensor) -> DiffTensor:
    if y.ndim != 3 or y.shape[1] != W.shape[0]:
        raise ContractError(f"cannot embed {y.shape} with a {W.shape} embedding")
    return matmul(transpose(y, (0, 2, 1)), W)  # B x n x d


def embed_strings(y, W: DiffTensor) -> DiffTensor:
    """``y_e = W^T y`` per column: ``B x K x n`` to ``B x d x n``."""
    return transpose(_embed_cl(as_tensor(y), W), (0, 2, 1))


def discriminator_map(y, bundle: ModelBundle) -> DiffTensor:
    """Per-position scores ``B x n`` before the final average."""
    y = as_tensor(y)
    check_simplex(y.data)
    return bundle.discriminator.score_map(_embed_cl(y, bundle.W))


def discriminator_forward(y, bundle: ModelBundle) -> DiffTensor:
    """Scalar score per sample for simplex-valued ``B x K x n`` inputs."""
    return reduce_mean(discriminator_map(y, bundle), axis=1)
