"""Receptive-field arithmetic for stride/kernel stacks."""

from __future__ import annotations

from typing import Sequence

from .config import DiscriminatorConfig, RecogniserConfig


def stack_rf(layers: Sequence[tuple[int, int]]) -> int:
    """Receptive field of one output unit for ``(kernel, stride)`` layers listed input-first.

    Walks the stack top-down with ``rf = rf * s + (k - s)``.
    """
    rf = 1
    for k, s in reversed(layers):
        rf = rf * s + (k - s)
    return rf


def recogniser_layers(config: RecogniserConfig) -> list[tuple[int, int]]:
    block = [(config.kernel, 1)] * config.convs_per_block + [(2, 2)]
    return block * config.blocks  # height pooling and the 1x1 projection are width-neutral


def discriminator_layers(config: DiscriminatorConfig) -> list[tuple[int, int]]:
    return [(config.kernel, 1)] * config.layers


def receptive_field(config) -> int:
    """Pixels (recogniser) or positions (discriminator) seen by one prediction."""
    if isinstance(config, RecogniserConfig):
        return stack_rf(recogniser_layers(config))
    if isinstance(config, DiscriminatorConfig):
        return stack_rf(discriminator_layers(config))
    return stack_rf(config)


def column_window(config: RecogniserConfig, t: int) -> tuple[int, int]:
    """Inclusive input-column span seen by output position ``t`` (may extend past the image)."""
    lo = hi = t
    for k, s in reversed(recogniser_layers(config)):
        pad = (k - 1) // 2 if s == 1 else 0  # same-padded convs, unpadded pools
        lo, hi = lo * s - pad, hi * s - pad + k - 1
    return lo, hi
