"""English word lists built from the optional ``wordfreq`` package."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConfigError


def _wordfreq():
    try:
        import wordfreq
    except ImportError as exc:
        raise ConfigError("building a word list needs the optional 'wordfreq' package") from exc
    return wordfreq


def english_words(top: int = 90_000, length: int | None = None) -> list[str]:
    """Sorted distinct lowercase ASCII-alphabetic words from the ``top`` most frequent English words."""
    wordfreq = _wordfreq()
    words = {w.lower() for w in wordfreq.top_n_list("en", top) if w.isascii() and w.isalpha()}
    if length is not None:
        words = {w for w in words if len(w) == length}
    return sorted(words)


def english_lines(count: int, seed: int = 0, top: int = 20_000, min_chars: int = 56) -> list[str]:
    """Pseudo-sentences: words drawn by corpus frequency until each line has at least ``min_chars`` characters."""
    wordfreq = _wordfreq()
    words = [w for w in wordfreq.top_n_list("en", top) if w.isascii() and w.isalpha()]
    p = np.array([wordfreq.word_frequency(w, "en") for w in words])
    p /= p.sum()
    rng = np.random.default_rng(seed)
    lines = []
    for _ in range(count):
        line = []
        while len(" ".join(line)) < min_chars:
            line.append(words[rng.choice(len(words), p=p)].lower())
        lines.append(" ".join(line))
    return lines


def write_word_list(path, words) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(w + "\n" for w in words), encoding="utf-8")
    return path
