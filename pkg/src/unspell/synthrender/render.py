"""Fixed-pitch text-line rendering over textured backgrounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..netpbm import read_netpbm
from ..textcorpus import UNK_CHAR, normalize
from .colour import ColourModel, build_colour_model, font_colour
from .glyphs import glyph, has_glyph
from .resample import resize

HEIGHT = 32
POSITION_WIDTH = 16  # pixels per predicted position (four 2x2 pools)


@dataclass(frozen=True)
class RenderStyle:
    pitch: int = 16
    glyph_height: int = 24
    noise_sigma: float = 0.03
    jitter_x: int = 1
    jitter_y: int = 1
    contrast: float = 0.35
    channels: int = 3
    palette_k: int = 8
    clean: bool = False  # white background, black ink, no noise

    def __post_init__(self):
        if self.pitch < 4 or self.glyph_height < 4 or self.glyph_height > HEIGHT:
            raise ValueError("pitch and glyph height must be in a sensible range")
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        if self.jitter_x > self.margin:
            # neighbouring glyphs stay disjoint only while jitter fits inside the margin
            raise ValueError(f"jitter_x must not exceed the glyph margin ({self.margin} px)")

    @property
    def glyph_width(self) -> int:
        return min(self.pitch - 2 * max(2, self.pitch // 8), round(0.6 * self.glyph_height))

    @property
    def margin(self) -> int:
        """Left offset of the glyph box inside its cell."""
        return (self.pitch - self.glyph_width) // 2

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SampleRecord:
    image: np.ndarray  # 32 x n*16 x C in [0, 1]
    text: str
    seed: int


def size_and_pad(image: np.ndarray, n: int) -> np.ndarray:
    """Rescale to height 32 with width min(ceil(W*32/H), n*16); right-pad with the per-channel mean."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        img = img[..., None]
    h, w = img.shape[:2]
    target = n * POSITION_WIDTH
    new_w = min(math.ceil(w * HEIGHT / h), target)
    out = resize(img, HEIGHT, new_w)
    if new_w < target:
        fill = out.reshape(-1, out.shape[-1]).mean(axis=0)
        pad = np.broadcast_to(fill, (HEIGHT, target - new_w, out.shape[-1]))
        out = np.concatenate([out, pad], axis=1)
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------------------
# backgrounds


def _smooth_noise(rng, h, w, cells_y, cells_x):
    grid = rng.standard_normal((cells_y + 1, cells_x + 1))
    return resize(grid, h, w)


def procedural_page(rng: np.random.Generator, h: int = 96, w: int = 768, channels: int = 3) -> np.ndarray:
    """Aged-paper texture: tinted base, low-frequency blotches and fine grain."""
    tone = np.array([0.86, 0.80, 0.68]) + rng.uniform(-0.08, 0.08, 3)
    base = np.broadcast_to(tone, (h, w, 3)).copy()
    blotch = _smooth_noise(rng, h, w, 3, 12) * 0.05 + _smooth_noise(rng, h, w, 12, 48) * 0.02
    stain = np.clip(_smooth_noise(rng, h, w, 2, 6) - 1.2, 0, None)[..., None] * np.array([0.10, 0.14, 0.2])
    grain = rng.standard_normal((h, w, 1)) * 0.015
    page = base + blotch[..., None] - stain + grain
    if channels == 1:
        page = page @ np.array([0.299, 0.587, 0.114])[:, None]
    return np.clip(page, 0.0, 1.0)


class BackgroundPool:
    """Background images to crop line patches from.

    Images come from a directory of PGM/PPM files when given; otherwise a
    fixed set of procedural pages is generated from ``seed``.
    """

    def __init__(self, images: list[np.ndarray], source: str):
        if not images:
            raise ValueError("background pool is empty")
        self.images = images
        self.source = source

    @classmethod
    def procedural(cls, channels: int = 3, seed: int = 0, count: int = 8) -> "BackgroundPool":
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xB6,)))
        return cls([procedural_page(rng, channels=channels) for _ in range(count)], "procedural")

    @classmethod
    def from_dir(cls, path, channels: int = 3) -> "BackgroundPool":
        files = sorted(p for p in Path(path).iterdir() if p.suffix.lower() in (".pgm", ".ppm"))
        images = []
        for f in files:
            img = read_netpbm(f)
            if img.shape[-1] != channels:
                img = np.repeat(img, 3, axis=-1) if channels == 3 else img @ np.array([0.299, 0.587, 0.114])[:, None]
            images.append(img)
        return cls(images, str(path))

    def patch(self, h: int, w: int, rng: np.random.Generator) -> np.ndarray:
        img = self.images[rng.integers(len(self.images))]
        ih, iw = img.shape[:2]
        if ih < h or iw < w:
            scale = max(h / ih, w / iw)
            img = resize(img, max(h, math.ceil(ih * scale)), max(w, math.ceil(iw * scale)))
            ih, iw = img.shape[:2]
        y = rng.integers(ih - h + 1)
        x = rng.integers(iw - w + 1)
        return img[y:y + h, x:x + w].copy()


# ---------------------------------------------------------------------------


class Renderer:
    """Holds the background pool and its colour model; renders lines deterministically per seed."""

    def __init__(self, style: RenderStyle = RenderStyle(), pool: BackgroundPool | None = None, seed: int = 0):
        self.style = style
        self.pool = pool or BackgroundPool.procedural(style.channels, seed)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xC0,)))
        self.palette: ColourModel = build_colour_model(self.pool.images, style.palette_k, rng)

    def render_line(self, text: str, n: int, rng: np.random.Generator | int) -> SampleRecord:
        seed = rng if isinstance(rng, (int, np.integer)) else -1
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(int(rng))
        st = self.style
        mode = "real" if UNK_CHAR in text else "synthetic"
        if normalize(text, mode) != text:
            raise ValueError(f"text must be normalised before rendering: {text!r}")
        if len(text) > n:
            raise ValueError(f"text longer than n={n}")
        for ch in text:
            if not has_glyph(ch):
                raise ValueError(f"no glyph for {ch!r}")
        width = max(n * POSITION_WIDTH, len(text) * st.pitch)
        c = st.channels
        if st.clean:
            canvas = np.ones((HEIGHT, width, c))
            ink = np.zeros(c)
        else:
            canvas = self.pool.patch(HEIGHT, width, rng)
            ink = font_colour(self.palette, canvas.reshape(-1, c).mean(axis=0), rng, st.contrast)
        gw, gh = st.glyph_width, st.glyph_height
        top = (HEIGHT - gh) // 2
        for i, ch in enumerate(text):
            cov = np.minimum(1.0, 1.5 * glyph(ch, gw, gh))
            jx = int(rng.integers(-st.jitter_x, st.jitter_x + 1))
            jy = int(rng.integers(-st.jitter_y, st.jitter_y + 1))
            x0 = i * st.pitch + st.margin + jx
            y0 = min(max(top + jy, 0), HEIGHT - gh)
            region = canvas[y0:y0 + gh, x0:x0 + gw]
            a = cov[..., None]
            region[...] = region * (1 - a) + ink * a
        if not st.clean and st.noise_sigma > 0:
            canvas = canvas + rng.standard_normal(canvas.shape) * st.noise_sigma
        image = size_and_pad(np.clip(canvas, 0.0, 1.0), n)
        return SampleRecord(image, text, int(seed))


def render_line(text: str, n: int, style: RenderStyle = RenderStyle(), rng=0, pool=None) -> SampleRecord:
    """Convenience wrapper building a one-off :class:`Renderer`."""
    return Renderer(style, pool).render_line(text, n, rng)
