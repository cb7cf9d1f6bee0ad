"""Binary PGM (P5) and PPM (P6) images."""

from __future__ import annotations

from pathlib import Path

import numpy as np


class NetpbmError(ValueError):
    pass


def _tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    out, pos = [], 0
    while len(out) < count:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if pos < len(buf) and buf[pos:pos + 1] == b"#":
            while pos < len(buf) and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise NetpbmError("truncated header")
        out.append(buf[start:pos])
    return out, pos + 1  # single whitespace byte ends the header


def read_netpbm(path) -> np.ndarray:
    """Return an H x W x C float array in [0, 1] (C=1 for PGM, 3 for PPM)."""
    buf = Path(path).read_bytes()
    magic = buf[:2]
    if magic not in (b"P5", b"P6"):
        raise NetpbmError(f"{path}: not a binary PGM/PPM file")
    try:
        (w, h, maxval), pos = _tokens(buf[2:], 3)
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise NetpbmError(f"{path}: malformed header") from exc
    if w < 1 or h < 1 or not 0 < maxval < 65536:
        raise NetpbmError(f"{path}: invalid dimensions or maxval")
    c = 1 if magic == b"P5" else 3
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    need = w * h * c * dtype.itemsize
    body = buf[2 + pos:2 + pos + need]
    if len(body) != need:
        raise NetpbmError(f"{path}: expected {need} pixel bytes, found {len(body)}")
    data = np.frombuffer(body, dtype=dtype).reshape(h, w, c)
    return data.astype(np.float64) / maxval


def write_netpbm(path, image: np.ndarray) -> None:
    """Write an H x W (x C) image in [0, 1] as 8-bit P5 or P6."""
    img = np.asarray(image)
    if img.ndim == 2:
        img = img[..., None]
    h, w, c = img.shape
    if c not in (1, 3):
        raise NetpbmError(f"cannot write {c}-channel image")
    raw = np.clip(np.round(img * 255), 0, 255).astype(np.uint8)
    header = f"{'P5' if c == 1 else 'P6'}\n{w} {h}\n255\n".encode()
    Path(path).write_bytes(header + raw.tobytes())
