"""Accuracy metrics, confusion matrices and learning-order analysis."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError
from .textcorpus import Alphabet, decode


def edit_distance(a: Sequence, b: Sequence) -> int:
    """Unit-cost Levenshtein distance between two token sequences."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _check_lists(gt_list, pred_list):
    if len(gt_list) != len(pred_list):
        raise DataError(f"{len(gt_list)} ground truths but {len(pred_list)} predictions")


@dataclass
class AccuracyReport:
    char_accuracy: float
    word_accuracy: float
    count: int
    char_distances: list[int] = field(repr=False)
    word_distances: list[int] = field(repr=False)

    @property
    def negative(self) -> bool:
        return self.char_accuracy < 0 or self.word_accuracy < 0

    def summary(self) -> dict:
        return {"char_accuracy": self.char_accuracy, "word_accuracy": self.word_accuracy,
                "count": self.count, "negative": self.negative}

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def write_csv(self, path, gt_list=None, pred_list=None) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            head = ["index", "char_distance", "word_distance"]
            if gt_list is not None:
                head += ["ground_truth", "prediction"]
            w.writerow(head)
            for i, (c, d) in enumerate(zip(self.char_distances, self.word_distances)):
                row = [i, c, d]
                if gt_list is not None:
                    row += [gt_list[i], pred_list[i]]
                w.writerow(row)


def _accuracy(gt_list, pred_list, tokenize) -> tuple[float, list[int]]:
    _check_lists(gt_list, pred_list)
    if not gt_list:
        raise DataError("no samples to score")
    total, dists = 0.0, []
    for i, (g, p) in enumerate(zip(gt_list, pred_list)):
        gt, pr = tokenize(g), tokenize(p)
        if not gt:
            raise DataError(f"sample {i}: empty ground truth")
        d = edit_distance(gt, pr)
        dists.append(d)
        total += d / len(gt)
    return 1.0 - total / len(gt_list), dists


def _words(s: str) -> list[str]:
    return s.split()


def char_accuracy(gt_list: Sequence[str], pred_list: Sequence[str]) -> float:
    """``1 - mean(EditDist / len(gt))`` over characters; not clamped at zero."""
    return _accuracy(gt_list, pred_list, list)[0]


def word_accuracy(gt_list: Sequence[str], pred_list: Sequence[str]) -> float:
    """As :func:`char_accuracy` with space-delimited words as tokens."""
    return _accuracy(gt_list, pred_list, _words)[0]


def accuracy_report(gt_list: Sequence[str], pred_list: Sequence[str]) -> AccuracyReport:
    ca, cd = _accuracy(gt_list, pred_list, list)
    wa, wd = _accuracy(gt_list, pred_list, _words)
    return AccuracyReport(ca, wa, len(gt_list), cd, wd)


def predict_strings(logits: np.ndarray, alphabet: Alphabet) -> tuple[np.ndarray, list[str]]:
    """Per-position argmax of ``B x K x n`` logits, then null stripping."""
    idx = np.asarray(logits).argmax(axis=1)
    return idx, [decode(row, alphabet) for row in idx]


# ---------------------------------------------------------------------------


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # K x K, rows ground truth, columns prediction
    alphabet: Alphabet

    @property
    def row_marginals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def accuracy(self) -> float:
        total = self.counts.sum()
        return float(np.trace(self.counts) / total) if total else float("nan")

    def write_csv(self, path) -> None:
        labels = [self.alphabet.label(i) for i in range(self.alphabet.K)]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gt\\pred"] + labels)
            for lab, row in zip(labels, self.counts):
                w.writerow([lab] + [int(v) for v in row])


def confusion(gt_encoded: np.ndarray, pred_encoded: np.ndarray, alphabet: Alphabet) -> ConfusionMatrix:
    """Position-wise counts over fixed-length encodings; null-vs-null positions are skipped."""
    gt = np.asarray(gt_encoded)
    pr = np.asarray(pred_encoded)
    if gt.shape != pr.shape:
        raise DataError(f"encoded shapes differ: {gt.shape} vs {pr.shape}")
    K = alphabet.K
    keep = ~((gt == alphabet.null) & (pr == alphabet.null))
    counts = np.bincount(gt[keep] * K + pr[keep], minlength=K * K).reshape(K, K)
    return ConfusionMatrix(counts, alphabet)


def per_char_accuracy(gt_encoded: np.ndarray, pred_encoded: np.ndarray, K: int) -> np.ndarray:
    """Fraction of ground-truth positions holding symbol ``k`` that were predicted as ``k`` (NaN if absent)."""
    gt = np.asarray(gt_encoded).ravel()
    pr = np.asarray(pred_encoded).ravel()
    if gt.shape != pr.shape:
        raise DataError("encoded shapes differ")
    seen = np.bincount(gt, minlength=K).astype(float)
    hit = np.bincount(gt[gt == pr], minlength=K).astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(seen > 0, hit / seen, np.nan)


# ---------------------------------------------------------------------------


@dataclass
class LearningOrderRecord:
    crossing: dict[str, int | None]  # None marks a character never reaching the threshold
    rank: dict[str, int]  # 1 = learned first; only learned characters

    @property
    def learned(self) -> list[str]:
        return sorted(self.rank, key=self.rank.get)

    @property
    def unlearned(self) -> list[str]:
        return [c for c, it in self.crossing.items() if it is None]


def learning_order(iterations: Sequence[int], curves: Mapping[str, Sequence[float]],
                   threshold: float = 0.5) -> LearningOrderRecord:
    """First evaluation iteration at which each character's accuracy reaches ``threshold``."""
    if not curves or len(iterations) == 0:
        raise DataError("learning order needs nonempty curves")
    crossing = {}
    for ch, values in curves.items():
        if len(values) != len(iterations):
            raise DataError(f"curve for {ch!r} has {len(values)} points, expected {len(iterations)}")
        hits = [it for it, v in zip(iterations, values) if v is not None and not math.isnan(v) and v >= threshold]
        crossing[ch] = int(hits[0]) if hits else None
    learned = sorted((it, ch) for ch, it in crossing.items() if it is not None)
    return LearningOrderRecord(crossing, {ch: r for r, (_, ch) in enumerate(learned, 1)})


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties sharing their mean rank."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v))
    sorted_v = v[order]
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman_rho(a: Sequence[float], b: Sequence[float]) -> float:
    """Pearson correlation of average ranks."""
    if len(a) != len(b):
        raise DataError(f"rankings differ in length: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise DataError("Spearman correlation needs at least two items")
    ra, rb = average_ranks(a), average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = math.sqrt(float((ra * ra).sum() * (rb * rb).sum()))
    if denom == 0:
        raise DataError("Spearman correlation is undefined for constant input")
    return float(np.clip((ra * rb).sum() / denom, -1.0, 1.0))


def frequency_order_correlation(order: LearningOrderRecord, frequencies: Mapping[str, float]) -> float:
    """Spearman rho between learning rank and frequency rank (most frequent = rank 1) over learned characters."""
    chars = [c for c in order.learned if c in frequencies]
    return spearman_rho([order.rank[c] for c in chars], [-frequencies[c] for c in chars])


def curve_auc(iterations: Sequence[float], values: Sequence[float]) -> float:
    """Trapezoidal area under ``values`` over ``iterations``."""
    x = np.asarray(iterations, dtype=float)
    y = np.asarray(values, dtype=float)
    if len(x) < 2 or len(x) != len(y):
        raise DataError("AUC needs at least two matching points")
    if np.any(np.diff(x) <= 0):
        raise DataError("iterations must be strictly increasing")
    if not np.isfinite(y).all():
        raise DataError("curve values must be finite")
    return float(((x[1:] - x[:-1]) * (y[1:] + y[:-1]) / 2).sum())
