"""Subcommand bodies and flat-config resolution, shared by the CLI and the experiment runner."""

from __future__ import annotations

import json
from dataclasses import fields
from pathlib import Path

from ..advtrain import TrainConfig, evaluate_bundle, run_training
from ..errors import ConfigError
from ..evalkit import confusion
from ..nets import load_checkpoint
from ..synthrender import RenderStyle, generate_dataset, load_shard
from ..textcorpus import load_corpus
from .ingest import DEFAULT_TEST_COUNT, ingest_lines
from .report import build_report


class UsageError(Exception):
    """Bad command line: unknown key, malformed override, missing required value."""


STYLE_KEYS = tuple(f.name for f in fields(RenderStyle))

DEFAULTS = {
    "synth": dict(corpus=None, kind="word", length=None, n=None, out=None, count_train=100_000, count_test=1_000,
                  seed=0, background_dir=None, test_corpus=None, **RenderStyle().__dict__),
    "train": {f.name: (None if f.name == "dataset" else f.default) for f in fields(TrainConfig)},
    "eval": dict(checkpoint=None, dataset=None, out=None, count=None, batch=64, seed=0),
    "ingest-lines": dict(images=None, transcripts=None, n=None, out=None, test_count=DEFAULT_TEST_COUNT,
                         channels=None, seed=0),
    "report": dict(root=None, out=None, seed=0),
}
REQUIRED = {
    "synth": ("corpus", "n", "out"),
    "train": ("dataset",),
    "eval": ("checkpoint", "dataset"),
    "ingest-lines": ("images", "transcripts", "n", "out"),
    "report": ("root",),
}


def parse_override(item: str) -> tuple[str, object]:
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise UsageError(f"override {item!r} is not key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def read_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(data, dict) or any(isinstance(v, (dict, list)) for v in data.values()):
        raise ConfigError(f"config file {path} must be a flat JSON object")
    return data


def resolve(command: str, config_file=None, flags: dict | None = None, overrides=()) -> dict:
    """Defaults, then the config file, then explicit flags, then ``key=value`` overrides."""
    defaults = DEFAULTS[command]
    out = dict(defaults)
    if config_file:
        data = read_config_file(config_file)
        unknown = sorted(set(data) - set(defaults))
        if unknown:
            raise ConfigError(f"unknown keys in {config_file}: {', '.join(unknown)}")
        out.update(data)
    out.update({k: v for k, v in (flags or {}).items() if v is not None})
    for item in overrides:
        key, value = parse_override(item)
        if key not in defaults:
            raise UsageError(f"unknown key {key!r} for {command}")
        out[key] = value
    missing = [k for k in REQUIRED[command] if out.get(k) in (None, "")]
    if missing:
        raise UsageError(f"{command} needs {', '.join(missing)}")
    return out


def echo_config(directory, command: str, config: dict) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / "resolved_config.json").write_text(
        json.dumps({"command": command, "config": config}, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _existing(path, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"{what} {p} does not exist")
    return p


# -- subcommand bodies


def do_synth(cfg: dict) -> dict:
    corpus_path = _existing(cfg["corpus"], "corpus")
    n = int(cfg["n"])
    length = cfg["length"] if cfg["kind"] == "word" else (cfg["length"] or n)
    corpus = load_corpus(corpus_path, cfg["kind"], length)
    test_corpus = None
    if cfg["test_corpus"]:
        test_corpus = load_corpus(_existing(cfg["test_corpus"], "test corpus"), cfg["kind"], length)
    try:
        style = RenderStyle(**{k: cfg[k] for k in STYLE_KEYS})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid render style: {exc}") from exc
    background = _existing(cfg["background_dir"], "background directory") if cfg["background_dir"] else None
    out = generate_dataset(corpus, n, cfg["out"], int(cfg["count_train"]), int(cfg["count_test"]),
                           seed=int(cfg["seed"]), style=style, background_dir=background, test_corpus=test_corpus)
    echo_config(out, "synth", cfg)
    return {"out": str(out), "train": int(cfg["count_train"]), "test": int(cfg["count_test"]), "n": n}


def do_train(cfg: dict) -> dict:
    _existing(cfg["dataset"], "dataset")
    if cfg.get("corpus"):
        _existing(cfg["corpus"], "corpus")
    tc = TrainConfig.from_dict(cfg)
    summary = run_training(tc)
    echo_config(tc.out, "train", tc.as_dict())
    return {k: summary[k] for k in ("best", "best_auc", "best_char_acc", "best_word_acc")} | {"out": tc.out}


def _test_shard(path) -> Path:
    p = _existing(path, "dataset")
    return p / "test" if (p / "test" / "manifest.json").exists() and not (p / "manifest.json").exists() else p


def do_eval(cfg: dict) -> dict:
    bundle = load_checkpoint(_existing(cfg["checkpoint"], "checkpoint"))
    shard = load_shard(_test_shard(cfg["dataset"]))
    if shard.alphabet != bundle.alphabet:
        raise ConfigError("checkpoint and dataset use different alphabets")
    if shard.manifest["channels"] != bundle.rec_config.channels:
        raise ConfigError(f"checkpoint expects {bundle.rec_config.channels}-channel images, "
                          f"dataset has {shard.manifest['channels']}")
    res = evaluate_bundle(bundle, shard, cfg["count"], batch=int(cfg["batch"]))
    result = {"char_accuracy": res.char_acc, "word_accuracy": res.word_acc, "count": res.report.count,
              "n": shard.n}
    if cfg["out"]:
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        res.report.write_json(out / "metrics.json")
        res.report.write_csv(out / "predictions.csv", res.gt, res.pred)
        confusion(res.gt_idx, res.pred_idx, bundle.alphabet).write_csv(out / "confusion.csv")
        with open(out / "per_char.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("char,accuracy\n")
            for i, v in enumerate(res.per_char):
                fh.write(f"{bundle.alphabet.label(i)},{'' if v != v else repr(float(v))}\n")
        echo_config(out, "eval", cfg)
    return result


def do_ingest(cfg: dict) -> dict:
    result = ingest_lines(_existing(cfg["images"], "image directory"), _existing(cfg["transcripts"], "transcripts"),
                          int(cfg["n"]), cfg["out"], int(cfg["test_count"]), cfg["channels"], int(cfg["seed"]))
    echo_config(cfg["out"], "ingest-lines", cfg)
    return result


def do_report(cfg: dict) -> dict:
    written = build_report(_existing(cfg["root"], "run directory"), cfg["out"])
    return {"out": str(Path(cfg["out"]) if cfg["out"] else Path(cfg["root"]) / "report"), "files": written}
