"""Per-run training logs.

A run directory holds:

- ``log.csv``: ``iter,d_loss,g_loss,char_acc,word_acc`` (accuracy cells are
  empty on rows without an evaluation; supervised runs log their loss as
  ``g_loss`` and leave ``d_loss`` empty)
- ``char_acc.csv``: ``iter`` then one column per alphabet symbol
- ``evals.csv``: ``iter,char_acc,word_acc,checkpoint`` where ``checkpoint``
  fingerprints the recogniser weights that were evaluated
- ``timing.csv``: ``iter,seconds`` wall-clock stamps, kept apart so the
  other files are a pure function of config and seed
- ``config.json``: the resolved configuration
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataError


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return "nan" if math.isnan(x) else repr(float(x))
    return str(x)


def _parse(s: str):
    return None if s == "" else float(s)


@dataclass
class RunLog:
    config: dict
    symbols: list[str]
    steps: list[tuple[int, float | None, float]] = field(default_factory=list)
    evals: list[tuple[int, float, float, str]] = field(default_factory=list)
    per_char: list[tuple[int, list[float]]] = field(default_factory=list)
    timing: list[tuple[int, float]] = field(default_factory=list)
    status: str = "running"

    def log_step(self, it: int, d: float | None, g: float) -> None:
        if self.steps and it <= self.steps[-1][0]:
            raise ValueError(f"iteration {it} does not follow {self.steps[-1][0]}")
        self.steps.append((it, d, g))

    def log_eval(self, it: int, char_acc: float, word_acc: float, per_char, checkpoint: str) -> None:
        if self.evals and it <= self.evals[-1][0]:
            raise ValueError(f"evaluation at {it} does not follow {self.evals[-1][0]}")
        self.evals.append((it, float(char_acc), float(word_acc), checkpoint))
        self.per_char.append((it, [float(v) for v in per_char]))

    @property
    def eval_iterations(self) -> list[int]:
        return [e[0] for e in self.evals]

    @property
    def char_curve(self) -> list[float]:
        return [e[1] for e in self.evals]

    def char_curves(self) -> dict[str, list[float]]:
        return {s: [row[i] for _, row in self.per_char] for i, s in enumerate(self.symbols)}

    # -- persistence
    def write(self, directory) -> Path:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        acc = {e[0]: e for e in self.evals}
        with open(d / "log.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "d_loss", "g_loss", "char_acc", "word_acc"])
            for it, dl, gl in self.steps:
                e = acc.get(it)
                w.writerow([it, _fmt(dl), _fmt(gl), _fmt(e[1] if e else None), _fmt(e[2] if e else None)])
        with open(d / "char_acc.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter"] + self.symbols)
            for it, row in self.per_char:
                w.writerow([it] + [_fmt(v) for v in row])
        with open(d / "evals.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "char_acc", "word_acc", "checkpoint"])
            for it, ca, wa, ck in self.evals:
                w.writerow([it, _fmt(ca), _fmt(wa), ck])
        with open(d / "timing.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "seconds"])
            for it, sec in self.timing:
                w.writerow([it, f"{sec:.3f}"])
        (d / "config.json").write_text(json.dumps({"config": self.config, "status": self.status},
                                                   indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return d

    @classmethod
    def read(cls, directory) -> "RunLog":
        d = Path(directory)
        try:
            meta = json.loads((d / "config.json").read_text(encoding="utf-8"))
            with open(d / "log.csv", newline="", encoding="utf-8") as fh:
                rows = list(csv.DictReader(fh))
            with open(d / "evals.csv", newline="", encoding="utf-8") as fh:
                evals = list(csv.DictReader(fh))
            with open(d / "char_acc.csv", newline="", encoding="utf-8") as fh:
                reader = csv.reader(fh)
                header = next(reader)
                per_char = [(int(r[0]), [float(v) for v in r[1:]]) for r in reader]
        except (OSError, KeyError, ValueError, StopIteration, json.JSONDecodeError) as exc:
            raise DataError(f"{d}: missing or corrupt run log ({exc})") from exc
        log = cls(meta["config"], header[1:], status=meta.get("status", "unknown"))
        try:
            log.steps = [(int(r["iter"]), _parse(r["d_loss"]), float(r["g_loss"])) for r in rows]
            log.evals = [(int(r["iter"]), float(r["char_acc"]), float(r["word_acc"]), r["checkpoint"]) for r in evals]
        except (KeyError, ValueError, TypeError) as exc:
            raise DataError(f"{d}: corrupt run log ({exc})") from exc
        log.per_char = per_char
        return log
