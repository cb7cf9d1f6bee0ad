"""Synthetic text-line images: glyph rendering, colour model, sizing, and dataset shards."""

from .colour import ColourModel, build_colour_model, font_colour, kmeans, luminance
from .render import (
    HEIGHT,
    POSITION_WIDTH,
    BackgroundPool,
    Renderer,
    RenderStyle,
    SampleRecord,
    procedural_page,
    render_line,
    size_and_pad,
)
from .resample import resize
from .shards import Shard, generate_dataset, load_shard, write_shard

__all__ = [
    "ColourModel", "build_colour_model", "font_colour", "kmeans", "luminance",
    "HEIGHT", "POSITION_WIDTH", "BackgroundPool", "Renderer", "RenderStyle", "SampleRecord",
    "procedural_page", "render_line", "size_and_pad", "resize",
    "Shard", "generate_dataset", "load_shard", "write_shard",
]
