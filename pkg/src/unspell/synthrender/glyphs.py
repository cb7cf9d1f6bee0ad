from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..textcorpus import UNK_CHAR
from . import _atlas
from .resample import resize


@lru_cache(maxsize=None)
def _cell(ch: str) -> np.ndarray:
    hexrow = _atlas.CELL_W // 4
    bits = _atlas.GLYPHS[ch]
    rows = [int(bits[i * hexrow:(i + 1) * hexrow], 16) for i in range(_atlas.CELL_H)]
    shifts = np.arange(_atlas.CELL_W - 1, -1, -1)
    return ((np.array(rows)[:, None] >> shifts) & 1).astype(np.float64)


def has_glyph(ch: str) -> bool:
    return ch in _atlas.GLYPHS or ch in (" ", UNK_CHAR)


@lru_cache(maxsize=None)
def glyph(ch: str, width: int, height: int) -> np.ndarray:
    """Ink coverage in [0, 1] for ``ch`` scaled to ``height x width``.

    Space is blank; the unknown symbol is a filled box.
    """
    if ch == " ":
        return np.zeros((height, width))
    if ch == UNK_CHAR:
        box = np.zeros((height, width))
        top = height // 4
        box[top:height - height // 6, :] = 1.0
        return box
    if ch not in _atlas.GLYPHS:
        raise ValueError(f"no glyph for {ch!r}")
    out = np.clip(resize(_cell(ch), height, width), 0.0, 1.0)
    out.setflags(write=False)
    return out
