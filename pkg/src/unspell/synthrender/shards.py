"""Dataset shard format (version 1).

A shard directory holds ``manifest.json``, ``images.bin`` (uint8 records,
row-major height/width/channel, index order) and ``labels.txt`` (one
normalised string per line). A dataset directory holds ``train/`` and
``test/`` shards.
"""

from __future__ import annotations

import json
import shutil
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..textcorpus import Alphabet, Corpus, encode, normalize
from .render import HEIGHT, POSITION_WIDTH, Renderer, RenderStyle

VERSION = 1
SPLITS = {"train": 1, "test": 2}


@dataclass
class Shard:
    path: Path
    manifest: dict
    images: np.ndarray  # count x H x W x C uint8 (memory-mapped)
    labels: list[str]

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(tuple(self.manifest["alphabet"]))

    @property
    def n(self) -> int:
        return self.manifest["n"]

    def __len__(self) -> int:
        return len(self.labels)

    def batch(self, idx, dtype=np.float32) -> np.ndarray:
        return self.images[np.asarray(idx)].astype(dtype) / 255.0

    def encoded(self) -> np.ndarray:
        a = self.alphabet
        return np.stack([encode(t, a, self.n) for t in self.labels])


def to_uint8(image: np.ndarray) -> np.ndarray:
    return np.clip(np.round(image * 255.0), 0, 255).astype(np.uint8)


def write_shard(path, images, labels, alphabet: Alphabet, n: int, seed: int, config: dict) -> Path:
    """Write a shard from an iterable of float images in [0, 1] and their labels."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    count = 0
    shape = None
    with open(path / "images.bin", "wb") as fh:
        for img in images:
            if shape is None:
                shape = img.shape
            elif img.shape != shape:
                raise ValueError(f"image {count} has shape {img.shape}, expected {shape}")
            fh.write(to_uint8(img).tobytes())
            count += 1
    labels = list(labels)  # may be filled while the image iterator runs
    if count != len(labels):
        raise ValueError(f"{count} images but {len(labels)} labels")
    channels = shape[2] if shape else config.get("channels", 3)
    if shape and shape[:2] != (HEIGHT, n * POSITION_WIDTH):
        raise ValueError(f"images are {shape[:2]}, expected {(HEIGHT, n * POSITION_WIDTH)}")
    with open(path / "labels.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(label + "\n" for label in labels)
    manifest = {
        "version": VERSION,
        "alphabet": list(alphabet.symbols),
        "n": n,
        "height": HEIGHT,
        "width": n * POSITION_WIDTH,
        "channels": channels,
        "count": count,
        "seed": seed,
        "generator": config,
    }
    (path / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_shard(path) -> Shard:
    path = Path(path)
    try:
        manifest = json.loads((path / "manifest.json").read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"{path}: unreadable shard manifest ({exc})") from exc
    if manifest.get("version") != VERSION:
        raise ValueError(f"{path}: unsupported shard version {manifest.get('version')}")
    labels = (path / "labels.txt").read_text(encoding="utf-8").split("\n")
    if labels and labels[-1] == "":
        labels.pop()
    h, w, c, count = manifest["height"], manifest["width"], manifest["channels"], manifest["count"]
    if len(labels) != count:
        raise ValueError(f"{path}: manifest count {count} != {len(labels)} labels")
    size = (path / "images.bin").stat().st_size
    if size != count * h * w * c:
        raise ValueError(f"{path}: images.bin holds {size} bytes, expected {count * h * w * c}")
    images = np.memmap(path / "images.bin", dtype=np.uint8, mode="r", shape=(count, h, w, c)) if count else np.zeros((0, h, w, c), np.uint8)
    return Shard(path, manifest, images, labels)


def sample_rng(seed: int, index: int, split: str) -> np.random.Generator:
    """Per-sample stream: entropy seed XOR index, keyed by split, so generation order does not matter."""
    return np.random.default_rng(np.random.SeedSequence(seed ^ index, spawn_key=(SPLITS[split],)))


def _render_split(renderer: Renderer, corpus: Corpus, n: int, count: int, seed: int, split: str):
    labels = []

    def images():
        for i in range(count):
            rng = sample_rng(seed, i, split)
            text = corpus.entries[rng.integers(len(corpus.entries))]
            labels.append(text)
            yield renderer.render_line(text, n, rng).image

    return images, labels


def generate_dataset(corpus: Corpus, n: int, out_dir, count_train: int = 100_000, count_test: int = 1_000,
                     seed: int = 0, style: RenderStyle = RenderStyle(), background_dir=None,
                     test_corpus: Corpus | None = None) -> Path:
    """Render train/test shards under ``out_dir``.

    Output is assembled in a sibling temporary directory and moved into place
    only on success.
    """
    from .render import BackgroundPool

    out_dir = Path(out_dir)
    alphabet = Alphabet.for_mode(corpus.mode)
    for text in corpus.entries:
        if normalize(text, corpus.mode) != text or len(text) > n:
            raise ValueError(f"corpus entry {text!r} is not a normalised string of length <= {n}")
    pool = BackgroundPool.from_dir(background_dir, style.channels) if background_dir else None
    renderer = Renderer(style, pool, seed)
    config = {
        "style": style.as_dict(),
        "background": renderer.pool.source,
        "corpus_kind": corpus.kind,
        "corpus_size": len(corpus.entries),
        "count_train": count_train,
        "count_test": count_test,
    }
    tmp = out_dir.with_name(out_dir.name + ".partial")
    if tmp.exists():
        shutil.rmtree(tmp)
    try:
        for split, count, source in (("train", count_train, corpus), ("test", count_test, test_corpus or corpus)):
            images, labels = _render_split(renderer, source, n, count, seed, split)
            write_shard(tmp / split, images(), labels, alphabet, n, seed, dict(config, split=split))
        if out_dir.exists():
            shutil.rmtree(out_dir)
        tmp.rename(out_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return out_dir
