from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LUMA = np.array([0.299, 0.587, 0.114])


def luminance(colour: np.ndarray) -> np.ndarray:
    colour = np.asarray(colour, dtype=np.float64)
    if colour.shape[-1] == 1:
        return colour[..., 0]
    return colour @ LUMA


@dataclass
class ColourModel:
    centroids: np.ndarray  # k x C, ascending luminance
    inertia: list[float]  # within-cluster sum of squares per Lloyd iteration
    duplicate_centroids: bool = False


def kmeans(pixels: np.ndarray, k: int, rng: np.random.Generator, max_iter: int = 50) -> ColourModel:
    """Lloyd's algorithm with centroids seeded from distinct pixel values."""
    distinct = np.unique(pixels, axis=0)
    dup = len(distinct) < k
    init = rng.choice(len(distinct), size=k, replace=dup)
    centroids = distinct[init].astype(np.float64)
    inertia = []
    labels = None
    for _ in range(max_iter):
        d2 = ((pixels[:, None, :] - centroids[None]) ** 2).sum(axis=-1)
        new_labels = d2.argmin(axis=1)
        inertia.append(float(d2[np.arange(len(pixels)), new_labels].sum()))
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        for j in range(k):
            members = pixels[labels == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
    order = np.argsort(luminance(centroids), kind="stable")
    return ColourModel(centroids[order], inertia, dup)


def build_colour_model(pool, k: int, rng: np.random.Generator, sample: int = 100_000) -> ColourModel:
    """k-means palette over a uniform pixel sample of the background pool."""
    if not pool:
        raise ValueError("background pool is empty")
    if k < 1:
        raise ValueError("k must be positive")
    pixels = np.concatenate([np.asarray(img, dtype=np.float64).reshape(-1, img.shape[-1]) for img in pool])
    if len(pixels) > sample:
        pixels = pixels[rng.choice(len(pixels), size=sample, replace=False)]
    return kmeans(pixels, k, rng)


def font_colour(model: ColourModel, background_mean: np.ndarray, rng: np.random.Generator,
                margin: float = 0.35) -> np.ndarray:
    """Draw from the darker half of the palette, darkened until it clears ``margin`` luminance below the background."""
    dark = model.centroids[: max(1, len(model.centroids) // 2)]
    colour = dark[rng.integers(len(dark))].copy()
    target = luminance(background_mean) - margin
    lum = luminance(colour)
    if lum > target:
        colour = colour * (max(target, 0.0) / lum) if lum > 0 else colour
    return np.clip(colour, 0.0, 1.0)
