"""Differentiable operations used by the recogniser and discriminator.

Layout is channels-last throughout: images are ``(B, H, W, C)``, sequences
``(B, L, C)``. Every op also accepts the unbatched form and returns it
unbatched. Each op has a hand-written backward; gradients are validated
against central finite differences in the test suite.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tensor import DiffTensor, _sigmoid, as_tensor, is_grad_enabled, make_result

BN_EPS = 1e-5


def _pads(k: int, padding: str) -> tuple[int, int]:
    if padding == "same":
        return (k - 1) // 2, k - 1 - (k - 1) // 2
    if padding == "valid":
        return 0, 0
    raise ValueError(f"unknown padding mode {padding!r}")


def _conv_forward(xd: np.ndarray, wd: np.ndarray, stride: int, ph, pw, keep_cols: bool = False):
    """Raw channels-last 2-D cross-correlation via im2col. Returns (y, xp, Ho, Wo, cols|None)."""
    xp = np.pad(xd, ((0, 0), ph, pw, (0, 0))) if (sum(ph) or sum(pw)) else xd
    kh, kw, cin, cout = wd.shape
    if kh > xp.shape[1] or kw > xp.shape[2]:
        raise ValueError(f"kernel {kh}x{kw} larger than padded input {xp.shape[1]}x{xp.shape[2]}")
    b = xp.shape[0]
    ho = (xp.shape[1] - kh) // stride + 1
    wo = (xp.shape[2] - kw) // stride + 1
    cols = _im2col(xp, kh, kw, stride, ho, wo)
    y = (cols @ wd.reshape(kh * kw * cin, cout)).reshape(b, ho, wo, cout)
    return y, xp, ho, wo, (cols if keep_cols else None)


def _im2col(xp, kh, kw, stride, ho, wo):
    win = sliding_window_view(xp, (kh, kw), axis=(1, 2))
    if stride != 1:
        win = win[:, ::stride, ::stride]
    win = win[:, :ho, :wo]
    b, c = xp.shape[0], xp.shape[3]
    return win.transpose(0, 1, 2, 4, 5, 3).reshape(b * ho * wo, kh * kw * c)


def conv2d(x: DiffTensor, w: DiffTensor, bias: DiffTensor | None = None,
           stride: int = 1, padding: str = "same") -> DiffTensor:
    """2-D convolution. ``x``: (B,)H,W,Cin; ``w``: kh,kw,Cin,Cout."""
    unbatched = x.ndim == 3
    xd = x.data[None] if unbatched else x.data
    wd = w.data
    if xd.ndim != 4 or wd.ndim != 4:
        raise ValueError(f"conv2d expects (B,)H,W,C input and 4-D kernels, got {x.shape} and {w.shape}")
    if xd.shape[-1] != wd.shape[2]:
        raise ValueError(f"input channels {xd.shape[-1]} != kernel channels {wd.shape[2]}")
    kh, kw, cin, cout = wd.shape
    ph, pw = _pads(kh, padding), _pads(kw, padding)
    keep = is_grad_enabled() and w.requires_grad
    y, xp, ho, wo, cols = _conv_forward(xd, wd, stride, ph, pw, keep_cols=keep)
    if bias is not None:
        y = y + bias.data
    h, wdt = xd.shape[1], xd.shape[2]
    parents = (x, w) if bias is None else (x, w, bias)

    def _bw(g):
        g4 = g[None] if unbatched else g
        g2 = g4.reshape(-1, cout)
        gx = gw = None
        if w.requires_grad:
            c = cols if cols is not None else _im2col(xp, kh, kw, stride, ho, wo)
            gw = (c.T @ g2).reshape(wd.shape)
        if x.requires_grad:
            if stride == 1:
                # input gradient = correlation of the re-padded output gradient with the flipped kernel
                wf = wd[::-1, ::-1].transpose(0, 1, 3, 2)
                gph = (kh - 1 - ph[0], h - ho + ph[0])
                gpw = (kw - 1 - pw[0], wdt - wo + pw[0])
                gx = _conv_forward(g4, wf, 1, gph, gpw)[0]
            else:
                gcols = (g2 @ wd.reshape(-1, cout).T).reshape(g4.shape[0], ho, wo, kh, kw, cin)
                gxp = np.zeros(xp.shape, dtype=g.dtype)
                for i in range(kh):
                    for j in range(kw):
                        gxp[:, i:i + stride * ho:stride, j:j + stride * wo:stride] += gcols[:, :, :, i, j]
                gx = gxp[:, ph[0]:ph[0] + h, pw[0]:pw[0] + wdt]
            if unbatched:
                gx = gx[0]
        out = [gx, gw]
        if bias is not None:
            out.append(g2.sum(axis=0) if bias.requires_grad else None)
        return out

    return make_result(y[0] if unbatched else y, parents, _bw)


def conv1d(x: DiffTensor, w: DiffTensor, bias: DiffTensor | None = None) -> DiffTensor:
    """Stride-1 same-zero-padded 1-D convolution. ``x``: (B,)L,Cin; ``w``: k,Cin,Cout."""
    k = w.shape[0]
    if k % 2 == 0:
        raise ValueError(f"conv1d kernel size must be odd, got {k}")
    if x.shape[-1] != w.shape[1]:
        raise ValueError(f"input channels {x.shape[-1]} != kernel channels {w.shape[1]}")
    unbatched = x.ndim == 2
    xd = x.data[None] if unbatched else x.data
    b, length, cin = xd.shape
    cout = w.shape[2]
    pad = (k - 1) // 2
    xp = np.pad(xd, ((0, 0), (pad, pad), (0, 0)))
    cols = sliding_window_view(xp, k, axis=1)[:, :length]  # B, L, C, k
    cols = cols.transpose(0, 1, 3, 2).reshape(b * length, k * cin)
    wd = w.data
    y = (cols @ wd.reshape(k * cin, cout)).reshape(b, length, cout)
    if bias is not None:
        y = y + bias.data
    parents = (x, w) if bias is None else (x, w, bias)

    def _bw(g):
        g3 = g[None] if unbatched else g
        g2 = g3.reshape(-1, cout)
        gx = gw = None
        if w.requires_grad:
            gw = (cols.T @ g2).reshape(wd.shape)
        if x.requires_grad:
            gcols = (g2 @ wd.reshape(-1, cout).T).reshape(b, length, k, cin)
            gxp = np.zeros(xp.shape, dtype=g.dtype)
            for i in range(k):
                gxp[:, i:i + length] += gcols[:, :, i]
            gx = gxp[:, pad:pad + length]
            if unbatched:
                gx = gx[0]
        out = [gx, gw]
        if bias is not None:
            out.append(g2.sum(axis=0) if bias.requires_grad else None)
        return out

    return make_result(y[0] if unbatched else y, parents, _bw)


def max_pool2x2(x: DiffTensor) -> DiffTensor:
    """2x2 max pooling; the gradient goes to the first maximal element of each window (row-major)."""
    unbatched = x.ndim == 3
    xd = x.data[None] if unbatched else x.data
    b, h, w, c = xd.shape
    if h % 2 or w % 2:
        raise ValueError(f"max2x2 pooling needs even spatial extents, got {h}x{w}")
    quads = (xd[:, 0::2, 0::2], xd[:, 0::2, 1::2], xd[:, 1::2, 0::2], xd[:, 1::2, 1::2])
    y = np.maximum(np.maximum(quads[0], quads[1]), np.maximum(quads[2], quads[3]))

    def _bw(g):
        g4 = g[None] if unbatched else g
        gx = np.zeros(xd.shape, dtype=g.dtype)
        taken = np.zeros(y.shape, dtype=bool)
        for (di, dj), q in zip(((0, 0), (0, 1), (1, 0), (1, 1)), quads):
            hit = (q == y) & ~taken
            taken |= hit
            gx[:, di::2, dj::2] = np.where(hit, g4, 0)
        return (gx[0] if unbatched else gx,)

    return make_result(y[0] if unbatched else y, (x,), _bw)


def avg_pool(x: DiffTensor, axis: int) -> DiffTensor:
    """Average over ``axis``, keeping it with extent 1."""
    return x.mean(axis=axis, keepdims=True)


def pool(x: DiffTensor, kind: str) -> DiffTensor:
    """``max2x2`` over (B,)H,W,C; ``avg-over-height`` on H; ``avg-over-length`` on L of (B,)L,C."""
    if kind == "max2x2":
        return max_pool2x2(x)
    if kind == "avg-over-height":
        return avg_pool(x, -3)
    if kind == "avg-over-length":
        return avg_pool(x, -2)
    raise ValueError(f"unknown pooling kind {kind!r}")


def batch_norm(x: DiffTensor, gamma: DiffTensor, beta: DiffTensor,
               mean: np.ndarray | None = None, var: np.ndarray | None = None,
               eps: float = BN_EPS):
    """Normalise over every axis but the last.

    With ``mean``/``var`` omitted the current batch statistics are used (train
    mode). Returns ``(out, batch_mean, batch_var)``; the statistics are None in
    eval mode.
    """
    xd = x.data
    axes = tuple(range(xd.ndim - 1))
    gd, bd = gamma.data, beta.data
    if mean is None:
        mu = xd.mean(axis=axes)
        centred = xd - mu
        v = (centred * centred).mean(axis=axes)
        inv = 1.0 / np.sqrt(v + eps)
        xhat = centred * inv
        count = xd.size // xd.shape[-1]

        def _bw(g):
            gb = g.sum(axis=axes)
            gg = (g * xhat).sum(axis=axes)
            gx = None
            if x.requires_grad:
                gx = (gd * inv / count) * (count * g - gb - xhat * gg)
            return gx, gg, gb

        out = make_result(xhat * gd + bd, (x, gamma, beta), _bw)
        return out, mu, v

    inv = (1.0 / np.sqrt(var + eps)).astype(xd.dtype)
    xhat = (xd - mean.astype(xd.dtype)) * inv

    def _bw_eval(g):
        return g * (gd * inv), (g * xhat).sum(axis=axes), g.sum(axis=axes)

    return make_result(xhat * gd + bd, (x, gamma, beta), _bw_eval), None, None


def layer_norm(x: DiffTensor, gamma: DiffTensor, beta: DiffTensor, eps: float = BN_EPS) -> DiffTensor:
    """Normalise each feature vector (last axis) independently."""
    xd = x.data
    d = xd.shape[-1]
    mu = xd.mean(axis=-1, keepdims=True)
    centred = xd - mu
    v = (centred * centred).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(v + eps)
    xhat = centred * inv
    gd, bd = gamma.data, beta.data
    lead = tuple(range(xd.ndim - 1))

    def _bw(g):
        gx = None
        if x.requires_grad:
            dxhat = g * gd
            gx = (inv / d) * (d * dxhat - dxhat.sum(axis=-1, keepdims=True)
                              - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True))
        return gx, (g * xhat).sum(axis=lead), g.sum(axis=lead)

    return make_result(xhat * gd + bd, (x, gamma, beta), _bw)


def normalize(x: DiffTensor, kind: str, mode: str = "train", gamma=None, beta=None,
              running: tuple[np.ndarray, np.ndarray] | None = None, eps: float = BN_EPS) -> DiffTensor:
    """Dispatcher over batch/layer normalisation.

    Missing ``gamma``/``beta`` default to the identity affine map. Eval-mode
    batch norm requires ``running=(mean, var)``.
    """
    c = x.shape[-1]
    gamma = gamma if gamma is not None else DiffTensor(np.ones(c, x.dtype))
    beta = beta if beta is not None else DiffTensor(np.zeros(c, x.dtype))
    if kind == "layer":
        return layer_norm(x, gamma, beta, eps)
    if kind != "batch":
        raise ValueError(f"unknown normalisation kind {kind!r}")
    if x.ndim < 2:
        raise ValueError("batch normalisation needs a batch axis")
    if mode == "train":
        return batch_norm(x, gamma, beta, eps=eps)[0]
    if running is None:
        raise ValueError("eval-mode batch normalisation needs running statistics")
    return batch_norm(x, gamma, beta, running[0], running[1], eps)[0]


def leaky_relu(x: DiffTensor, slope: float = 0.2) -> DiffTensor:
    if not 0.0 < slope < 1.0:
        raise ValueError(f"leaky-ReLU slope must lie in (0, 1), got {slope}")
    xd = x.data
    pos = xd >= 0
    y = np.where(pos, xd, xd * xd.dtype.type(slope))
    return make_result(y, (x,), lambda g: (np.where(pos, g, g * g.dtype.type(slope)),))


def softmax(x: DiffTensor, axis: int = -1) -> DiffTensor:
    z = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=axis, keepdims=True)
    return make_result(y, (x,), lambda g: (y * (g - (g * y).sum(axis=axis, keepdims=True)),))


def activate(x: DiffTensor, kind: str, slope: float = 0.2, axis: int = -1) -> DiffTensor:
    if kind == "leaky_relu":
        return leaky_relu(x, slope)
    if kind == "softmax":
        return softmax(x, axis)
    raise ValueError(f"unknown activation {kind!r}")


def linear(x: DiffTensor, weight: DiffTensor, bias: DiffTensor | None = None) -> DiffTensor:
    """Affine map along the last axis: ``x @ weight + bias``."""
    if x.shape[-1] != weight.shape[0]:
        raise ValueError(f"linear: input width {x.shape[-1]} != weight rows {weight.shape[0]}")
    if bias is not None and bias.shape != (weight.shape[1],):
        raise ValueError(f"linear: bias shape {bias.shape} != ({weight.shape[1]},)")
    xd, wd = x.data, weight.data
    y = xd @ wd
    if bias is not None:
        y = y + bias.data
    parents = (x, weight) if bias is None else (x, weight, bias)

    def _bw(g):
        g2 = g.reshape(-1, g.shape[-1])
        out = [
            g @ wd.T if x.requires_grad else None,
            xd.reshape(-1, xd.shape[-1]).T @ g2 if weight.requires_grad else None,
        ]
        if bias is not None:
            out.append(g2.sum(axis=0))
        return out

    return make_result(y, parents, _bw)


def lstm_seq(x: DiffTensor, w_ih: DiffTensor, w_hh: DiffTensor, bias: DiffTensor) -> DiffTensor:
    """Left-to-right LSTM from zero state; returns the hidden state at every step.

    ``x``: (B,)T,Din; ``w_ih``: Din,4H; ``w_hh``: H,4H; ``bias``: 4H. Gate
    order along the 4H axis is input, forget, cell, output.
    """
    unbatched = x.ndim == 2
    xd = x.data[None] if unbatched else x.data
    b, steps, din = xd.shape
    hid = w_hh.shape[0]
    if w_ih.shape != (din, 4 * hid) or w_hh.shape != (hid, 4 * hid) or bias.shape != (4 * hid,):
        raise ValueError("lstm_seq: inconsistent parameter shapes")
    wi, wh = w_ih.data, w_hh.data
    xw = xd @ wi + bias.data
    dt = xw.dtype
    hs = np.zeros((b, steps + 1, hid), dt)
    cs = np.zeros((b, steps + 1, hid), dt)
    gates = np.empty((b, steps, 4, hid), dt)
    for t in range(steps):
        z = xw[:, t] + hs[:, t] @ wh
        i = _sigmoid(z[:, :hid])
        f = _sigmoid(z[:, hid:2 * hid])
        gg = np.tanh(z[:, 2 * hid:3 * hid])
        o = _sigmoid(z[:, 3 * hid:])
        cs[:, t + 1] = f * cs[:, t] + i * gg
        hs[:, t + 1] = o * np.tanh(cs[:, t + 1])
        gates[:, t, 0], gates[:, t, 1], gates[:, t, 2], gates[:, t, 3] = i, f, gg, o
    out = hs[:, 1:]

    def _bw(g):
        g3 = g[None] if unbatched else g
        dz = np.empty((b, steps, 4 * hid), dt)
        dwh = np.zeros_like(wh)
        dh_next = np.zeros((b, hid), dt)
        dc_next = np.zeros((b, hid), dt)
        for t in reversed(range(steps)):
            i, f, gg, o = gates[:, t, 0], gates[:, t, 1], gates[:, t, 2], gates[:, t, 3]
            tc = np.tanh(cs[:, t + 1])
            dh = g3[:, t] + dh_next
            dc = dh * o * (1 - tc * tc) + dc_next
            dzt = dz[:, t]
            dzt[:, :hid] = dc * gg * i * (1 - i)
            dzt[:, hid:2 * hid] = dc * cs[:, t] * f * (1 - f)
            dzt[:, 2 * hid:3 * hid] = dc * i * (1 - gg * gg)
            dzt[:, 3 * hid:] = dh * tc * o * (1 - o)
            dwh += hs[:, t].T @ dzt
            dh_next = dzt @ wh.T
            dc_next = dc * f
        dz2 = dz.reshape(-1, 4 * hid)
        gx = None
        if x.requires_grad:
            gx = dz @ wi.T
            if unbatched:
                gx = gx[0]
        return gx, xd.reshape(-1, din).T @ dz2, dwh, dz2.sum(axis=0)

    return make_result(out[0] if unbatched else out, (x, w_ih, w_hh, bias), _bw)


def cross_entropy(logits: DiffTensor, labels: np.ndarray, axis: int = 1) -> DiffTensor:
    """Mean negative log-likelihood of integer ``labels`` under softmax(logits, axis)."""
    z = np.moveaxis(logits.data, axis, -1)
    labels = np.asarray(labels)
    if z.shape[:-1] != labels.shape:
        raise ValueError(f"labels shape {labels.shape} does not match logits {logits.shape} on axis {axis}")
    z = z - z.max(axis=-1, keepdims=True)
    logz = np.log(np.exp(z).sum(axis=-1, keepdims=True))
    logp = z - logz
    picked = np.take_along_axis(logp, labels[..., None], axis=-1)[..., 0]
    count = picked.size
    loss = -picked.mean()

    def _bw(g):
        p = np.exp(logp)
        np.put_along_axis(p, labels[..., None], np.take_along_axis(p, labels[..., None], axis=-1) - 1, axis=-1)
        return (np.moveaxis(p * (g / count), -1, axis),)

    return make_result(np.asarray(loss, dtype=logits.dtype), (logits,), _bw)


def squared_error(scores: DiffTensor, target: float) -> DiffTensor:
    """Mean of ``(scores - target)**2``."""
    diff = scores.data - target
    count = diff.size

    def _bw(g):
        return (g * 2.0 * diff / count,)

    return make_result(np.asarray((diff * diff).mean(), dtype=scores.dtype), (as_tensor(scores),), _bw)
