"""Checkpoint format, version 1.

``manifest.json`` maps each tensor name to its shape, dtype (always
``"f32"``), byte offset and byte length inside ``weights.bin``, and carries
both configs, the alphabet and the creation seed. ``weights.bin`` is the
little-endian float32 data concatenated in manifest order.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from ..errors import ContractError
from ..textcorpus import Alphabet
from .config import DiscriminatorConfig, RecogniserConfig
from .models import ModelBundle

VERSION = 1
_F32 = np.dtype("<f4")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save_checkpoint(bundle: ModelBundle, path, extra: dict | None = None) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    tensors, offset, chunks = [], 0, []
    for name, arr in bundle.state().items():
        raw = np.ascontiguousarray(arr, dtype=_F32).tobytes()
        tensors.append({"name": name, "shape": list(arr.shape), "dtype": "f32", "offset": offset, "length": len(raw)})
        chunks.append(raw)
        offset += len(raw)
    manifest = {
        "version": VERSION,
        "tensors": tensors,
        "recogniser": bundle.rec_config.as_dict(),
        "discriminator": bundle.disc_config.as_dict(),
        "alphabet": list(bundle.alphabet.symbols),
        "seed": bundle.seed,
    }
    if extra:
        manifest["extra"] = extra
    # write-then-rename keeps a previous checkpoint intact if we are interrupted
    tmp = path / "weights.bin.tmp"
    tmp.write_bytes(b"".join(chunks))
    os.replace(tmp, path / "weights.bin")
    (path / "manifest.json").write_text(_dump(manifest), encoding="utf-8")
    return path


def read_manifest(path) -> dict:
    path = Path(path)
    try:
        manifest = json.loads((path / "manifest.json").read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ContractError(f"{path}: unreadable checkpoint manifest ({exc})") from exc
    if manifest.get("version") != VERSION:
        raise ContractError(f"{path}: unsupported checkpoint version {manifest.get('version')}")
    return manifest


def load_checkpoint(path) -> ModelBundle:
    path = Path(path)
    manifest = read_manifest(path)
    blob = (path / "weights.bin").read_bytes()
    bundle = ModelBundle(
        RecogniserConfig.from_dict(manifest["recogniser"]),
        DiscriminatorConfig.from_dict(manifest["discriminator"]),
        Alphabet(tuple(manifest["alphabet"])),
        seed=manifest["seed"],
    )
    arrays = {}
    for t in manifest["tensors"]:
        if t["dtype"] != "f32":
            raise ContractError(f"{t['name']}: unsupported dtype {t['dtype']}")
        start, length = t["offset"], t["length"]
        if start + length > len(blob) or length != 4 * int(np.prod(t["shape"], dtype=np.int64)):
            raise ContractError(f"{path}: tensor {t['name']} lies outside weights.bin or has the wrong length")
        arrays[t["name"]] = np.frombuffer(blob, _F32, length // 4, start).reshape(t["shape"])
    bundle.load_state(arrays)
    return bundle
