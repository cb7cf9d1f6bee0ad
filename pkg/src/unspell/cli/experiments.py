"""Named experiment presets, expanded into a plan of synth/train/eval steps and then executed."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from ..advtrain import TrainConfig
from ..errors import ConfigError
from ..textcorpus import normalize
from .commands import (
    DEFAULTS,
    STYLE_KEYS,
    UsageError,
    do_eval,
    do_ingest,
    do_synth,
    do_train,
    parse_override,
)

WORD_LENGTHS = (3, 5, 7, 9, 11, 13)
LONG_LENGTHS = (32, 48)
TRAIN_LENGTH = 24
RESTARTS = 8

# keys a user may override for every job of an experiment
SYNTH_OVERRIDES = ("count_train", "count_test", "background_dir") + STYLE_KEYS
TRAIN_OVERRIDES = tuple(f.name for f in fields(TrainConfig)
                        if f.name not in ("dataset", "corpus", "corpus_kind", "corpus_length", "n", "out"))


@dataclass
class Step:
    kind: str  # synth | train | eval | ingest | split | tokens
    name: str
    params: dict

    @property
    def runs(self) -> int:
        return int(self.params.get("restarts", 1)) if self.kind == "train" else 0


@dataclass
class Plan:
    name: str
    out: str
    steps: list[Step] = field(default_factory=list)
    table: str | None = None

    @property
    def run_count(self) -> int:
        return sum(s.runs for s in self.steps)

    def as_dict(self) -> dict:
        return {"experiment": self.name, "out": self.out, "runs": self.run_count,
                "steps": [asdict(s) for s in self.steps]}


def _route(overrides) -> tuple[dict, dict]:
    synth, train = {}, {}
    for item in overrides:
        key, value = parse_override(item)
        if key in SYNTH_OVERRIDES:
            synth[key] = value
        elif key in TRAIN_OVERRIDES:
            train[key] = value
        else:
            raise UsageError(f"unknown experiment override {key!r}")
    return synth, train


def _need(opts: dict, key: str, name: str) -> str:
    if not opts.get(key):
        raise UsageError(f"experiment {name} needs --{key.replace('_', '-')}")
    return str(opts[key])


def _synth(name, out, corpus, kind, length, n, seed, extra, **kw) -> Step:
    params = dict(DEFAULTS["synth"], corpus=corpus, kind=kind, length=length, n=n, out=out, seed=seed)
    params.update(kw)
    params.update(extra)
    return Step("synth", name, params)


def _train(name, dataset, corpus, kind, length, out, seed, extra, **kw) -> Step:
    params = dict(DEFAULTS["train"], dataset=dataset, corpus=corpus, corpus_kind=kind, corpus_length=length,
                  out=out, seed=seed)
    params.update(kw)
    params.update(extra)
    return Step("train", name, params)


def _eval(name, checkpoint, dataset, out, count=None) -> Step:
    return Step("eval", name, dict(DEFAULTS["eval"], checkpoint=checkpoint, dataset=dataset, out=out, count=count))


def plan_wordlen(opts, synth, train) -> Plan:
    """Adversarial training on single words of each length, eight restarts per length."""
    out = Path(opts["out"])
    words = _need(opts, "corpus", "wordlen-convergence")
    plan = Plan("wordlen-convergence", str(out), table="wordlen_convergence.csv")
    for n in WORD_LENGTHS:
        data = str(out / "data" / f"len{n}")
        plan.steps.append(_synth(f"synth len{n}", data, words, "word", n, n, opts["seed"], synth))
        plan.steps.append(_train(f"train len{n}", data, words, "word", n, str(out / "train" / f"len{n}"),
                                 opts["seed"], dict({"restarts": RESTARTS}, **train)))
    return plan


def plan_lengthgen(opts, synth, train) -> Plan:
    """Train on length-24 strings, then evaluate the selected model on shorter words and longer strings."""
    out = Path(opts["out"])
    lines = _need(opts, "corpus", "length-generalisation")
    words = opts.get("words") or str(out / "corpora" / "words.txt")
    plan = Plan("length-generalisation", str(out), table="length_generalisation.csv")
    if not opts.get("words"):
        plan.steps.append(Step("tokens", "derive word list", {"source": lines, "out": words}))
    train_data = str(out / "data" / f"n{TRAIN_LENGTH}")
    plan.steps.append(_synth("synth n24", train_data, lines, "line", TRAIN_LENGTH, TRAIN_LENGTH, opts["seed"], synth))
    run_dir = str(out / "train")
    plan.steps.append(_train("train n24", train_data, lines, "line", TRAIN_LENGTH, run_dir, opts["seed"], train))
    eval_count = train.get("eval_count")
    best = str(Path(run_dir) / "best")
    plan.steps.append(_eval(f"eval n{TRAIN_LENGTH}", best, train_data, str(out / "eval" / f"n{TRAIN_LENGTH}"),
                            eval_count))
    for n in WORD_LENGTHS + LONG_LENGTHS:
        kind, source = ("word", words) if n in WORD_LENGTHS else ("line", lines)
        data = str(out / "data" / f"n{n}")
        plan.steps.append(_synth(f"synth n{n}", data, source, kind, n, n, opts["seed"], dict(synth, count_train=0)))
        plan.steps.append(_eval(f"eval n{n}", best, data, str(out / "eval" / f"n{n}"), eval_count))
    return plan


def plan_corpus_variation(opts, synth, train) -> Plan:
    """Fixed length-24 images; the discriminator sees (1) the same corpus, (2) a disjoint half, (3) another text."""
    out = Path(opts["out"])
    lines = _need(opts, "corpus", "corpus-variation")
    other = _need(opts, "alt_corpus", "corpus-variation")
    plan = Plan("corpus-variation", str(out), table="corpus_variation.csv")
    half_a, half_b = str(out / "corpora" / "half_a.txt"), str(out / "corpora" / "half_b.txt")
    plan.steps.append(Step("split", "split corpus", {"source": lines, "out_a": half_a, "out_b": half_b,
                                                     "seed": opts["seed"]}))
    data = str(out / "data")
    plan.steps.append(_synth("synth images", data, half_a, "line", TRAIN_LENGTH, TRAIN_LENGTH, opts["seed"], synth))
    for setting, corpus in (("same", half_a), ("disjoint", half_b), ("other", other)):
        run_dir = str(out / "train" / setting)
        plan.steps.append(_train(f"train {setting}", data, corpus, "line", TRAIN_LENGTH, run_dir, opts["seed"], train))
        plan.steps.append(_eval(f"eval {setting}", str(Path(run_dir) / "best"), data, str(out / "eval" / setting),
                                train.get("eval_count")))
    return plan


def plan_real_book(opts, synth, train) -> Plan:
    """Ingest real lines, then train the fully-convolutional and skip-RNN recognisers with the long discriminator."""
    out = Path(opts["out"])
    n = int(opts.get("n") or 56)
    data = str(out / "data")
    plan = Plan("real-book", str(out), table="real_book.csv")
    plan.steps.append(Step("ingest", "ingest lines", dict(
        DEFAULTS["ingest-lines"], images=_need(opts, "images", "real-book"),
        transcripts=_need(opts, "transcripts", "real-book"), n=n, out=data,
        test_count=opts.get("test_count") or DEFAULTS["ingest-lines"]["test_count"], seed=opts["seed"])))
    corpus = str(Path(data) / "corpus.txt")
    for model, skip in (("fullconv", None), ("skiprnn", 256)):
        run_dir = str(out / "train" / model)
        plan.steps.append(_train(f"train {model}", data, corpus, "line", n, run_dir, opts["seed"],
                                 dict({"skip_rnn": skip, "discriminator": "real"}, **train)))
        plan.steps.append(_eval(f"eval {model}", str(Path(run_dir) / "best"), data, str(out / "eval" / model),
                                train.get("eval_count")))
    return plan


PRESETS = {
    "wordlen-convergence": plan_wordlen,
    "length-generalisation": plan_lengthgen,
    "corpus-variation": plan_corpus_variation,
    "real-book": plan_real_book,
}


def make_plan(name: str, opts: dict, overrides=()) -> Plan:
    if name not in PRESETS:
        raise UsageError(f"unknown experiment {name!r}; choose from {', '.join(PRESETS)}")
    synth, train = _route(overrides)
    return PRESETS[name](dict(opts, seed=int(opts.get("seed") or 0)), synth, train)


# -- execution


def _split_corpus(params: dict) -> None:
    src = Path(params["source"])
    if not src.exists():
        raise ConfigError(f"corpus {src} does not exist")
    entries = sorted({normalize(line) for line in src.read_text(encoding="utf-8").split("\n")} - {""})
    if len(entries) < 2:
        raise ConfigError(f"corpus {src} has fewer than two distinct lines")
    order = np.random.default_rng(params["seed"]).permutation(len(entries))
    half = len(entries) // 2
    for key, idx in (("out_a", order[:half]), ("out_b", order[half:])):
        p = Path(params[key])
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text("".join(entries[i] + "\n" for i in sorted(idx)), encoding="utf-8")


def _derive_words(params: dict) -> None:
    src = Path(params["source"])
    if not src.exists():
        raise ConfigError(f"corpus {src} does not exist")
    words = sorted({w for line in src.read_text(encoding="utf-8").split("\n") for w in normalize(line).split()})
    p = Path(params["out"])
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text("".join(w + "\n" for w in words), encoding="utf-8")


def execute(plan: Plan, log=print) -> list[dict]:
    """Run every step in order; returns one result row per train/eval step and writes the summary table."""
    out = Path(plan.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "experiment.json").write_text(json.dumps(plan.as_dict(), indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")
    results = []
    for step in plan.steps:
        log(f"[{plan.name}] {step.name}")
        if step.kind == "synth":
            do_synth(step.params)
        elif step.kind == "train":
            results.append({"step": step.name, **do_train(step.params)})
        elif step.kind == "eval":
            results.append({"step": step.name, **do_eval(step.params)})
        elif step.kind == "ingest":
            do_ingest(step.params)
        elif step.kind == "split":
            _split_corpus(step.params)
        elif step.kind == "tokens":
            _derive_words(step.params)
        else:
            raise ValueError(f"unknown step kind {step.kind!r}")
    _write_table(plan, results)
    return results


def _write_table(plan: Plan, results: list[dict]) -> None:
    path = Path(plan.out) / plan.table
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if plan.name == "wordlen-convergence":
            w.writerow(["length", "best_run", "best_auc", "char_acc", "word_acc"])
            for r in results:
                w.writerow([r["step"].removeprefix("train len"), r["best"], r["best_auc"], r["best_char_acc"],
                            r["best_word_acc"]])
        elif plan.name == "length-generalisation":
            w.writerow(["length", "char_acc", "word_acc"])
            for r in results:
                if "n" in r:
                    w.writerow([r["n"], r["char_accuracy"], r["word_accuracy"]])
        else:
            w.writerow(["setting", "char_acc", "word_acc"])
            for r in results:
                if "char_accuracy" in r:
                    w.writerow([r["step"].removeprefix("eval "), r["char_accuracy"], r["word_accuracy"]])
