"""Turn pre-segmented real text-line images plus transcripts into dataset shards."""

from __future__ import annotations

import shutil
from pathlib import Path

import numpy as np

from ..errors import DataError
from ..netpbm import read_netpbm
from ..synthrender import luminance, size_and_pad, write_shard
from ..textcorpus import Alphabet, normalize

IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm")
DEFAULT_TEST_COUNT = 300


def _to_channels(img: np.ndarray, channels: int) -> np.ndarray:
    if img.shape[2] == channels:
        return img
    if channels == 3:
        return np.repeat(img, 3, axis=2)
    return luminance(img)[..., None]


def ingest_lines(image_dir, transcripts, n: int, out_dir, test_count: int = DEFAULT_TEST_COUNT,
                 channels: int | None = None, seed: int = 0) -> dict:
    """Sized, normalised train/test shards plus the train transcripts as ``corpus.txt``.

    Images pair with transcript lines in filename order; the first
    ``test_count`` pairs form the test split.
    """
    image_dir, out_dir = Path(image_dir), Path(out_dir)
    if n < 1 or test_count < 0:
        raise DataError("n must be positive and test_count non-negative")
    files = sorted(p for p in image_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES) if image_dir.is_dir() else []
    if not files:
        raise DataError(f"{image_dir}: no .pgm/.ppm images found")
    raw = Path(transcripts).read_text(encoding="utf-8").split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    if len(raw) != len(files):
        raise DataError(f"{len(files)} images but {len(raw)} transcript lines")
    if test_count > len(files):
        raise DataError(f"test_count {test_count} exceeds the {len(files)} available lines")
    texts = []
    for i, line in enumerate(raw):
        t = normalize(line, "real")
        if not t:
            raise DataError(f"transcript line {i + 1} is empty after normalisation")
        if len(t) > n:
            raise DataError(f"transcript line {i + 1} has {len(t)} characters after normalisation, more than n={n}")
        texts.append(t)

    first = read_netpbm(files[0])
    channels = channels or first.shape[2]
    if channels not in (1, 3):
        raise DataError("channels must be 1 or 3")

    def images(chunk):
        for p in chunk:
            yield size_and_pad(_to_channels(read_netpbm(p), channels), n)

    alphabet = Alphabet.real()
    config = {"source": "ingest-lines", "images": str(image_dir), "transcripts": str(transcripts),
              "test_count": test_count, "channels": channels}
    tmp = out_dir.with_name(out_dir.name + ".partial")
    if tmp.exists():
        shutil.rmtree(tmp)
    try:
        split = {"test": (files[:test_count], texts[:test_count]), "train": (files[test_count:], texts[test_count:])}
        for name, (chunk, labels) in split.items():
            write_shard(tmp / name, images(chunk), labels, alphabet, n, seed, dict(config, split=name))
        (tmp / "corpus.txt").write_text("".join(t + "\n" for t in split["train"][1]), encoding="utf-8")
        if out_dir.exists():
            shutil.rmtree(out_dir)
        tmp.rename(out_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return {"train": len(files) - test_count, "test": test_count, "n": n, "channels": channels,
            "corpus": str(out_dir / "corpus.txt")}
