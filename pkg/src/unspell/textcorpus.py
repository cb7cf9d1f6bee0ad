"""Alphabets, text normalisation, fixed-length encodings and unpaired corpus sampling."""

from __future__ import annotations

import re
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .ndgrad import DiffTensor

NULL = "<null>"
UNK = "<unk>"
# in-string stand-in for the unknown class; rendered as ⟨UNK⟩ in reports
UNK_CHAR = "■"
SUPPRESSED = set(',.?!`"*()')

_SPACES = re.compile(r" {2,}")


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be unique")
        if " " not in self.symbols or NULL not in self.symbols:
            raise ValueError("alphabet needs a space and a null symbol")

    @classmethod
    def synthetic(cls) -> "Alphabet":
        return cls(tuple(string.ascii_lowercase) + (" ", NULL))

    @classmethod
    def real(cls) -> "Alphabet":
        return cls(tuple(string.ascii_lowercase) + (" ", NULL, UNK))

    @classmethod
    def for_mode(cls, mode: str) -> "Alphabet":
        if mode == "synthetic":
            return cls.synthetic()
        if mode == "real":
            return cls.real()
        raise ValueError(f"unknown alphabet mode {mode!r}")

    @property
    def K(self) -> int:
        return len(self.symbols)

    @property
    def space(self) -> int:
        return self.symbols.index(" ")

    @property
    def null(self) -> int:
        return self.symbols.index(NULL)

    @property
    def unknown(self) -> int | None:
        return self.symbols.index(UNK) if UNK in self.symbols else None

    @property
    def mode(self) -> str:
        return "real" if UNK in self.symbols else "synthetic"

    def char_to_index(self) -> dict[str, int]:
        table = {s: i for i, s in enumerate(self.symbols) if len(s) == 1}
        if self.unknown is not None:
            table[UNK_CHAR] = self.unknown
        return table

    def label(self, index: int) -> str:
        """Printable name of a symbol for report headers."""
        s = self.symbols[index]
        return {" ": "<space>", UNK: "<unk>", NULL: "<null>"}.get(s, s)


def normalize(text: str, mode: str = "synthetic") -> str:
    """Case-fold and restrict ``text`` to the alphabet of ``mode``.

    synthetic: keep a-z and space only. real: drop , . ? ! ` " * ( ) and map
    any other non-alphabet character to the unknown symbol.
    """
    if mode not in ("synthetic", "real"):
        raise ValueError(f"unknown normalisation mode {mode!r}")
    out = []
    for ch in text.lower():
        if "a" <= ch <= "z":
            out.append(ch)
        elif ch.isspace():
            out.append(" ")
        elif mode == "real" and ch not in SUPPRESSED:
            out.append(UNK_CHAR)
    return _SPACES.sub(" ", "".join(out)).strip(" ")


def render(text: str) -> str:
    """Human-readable form: the unknown symbol shows as ⟨UNK⟩."""
    return text.replace(UNK_CHAR, "⟨UNK⟩")


def encode(text: str, alphabet: Alphabet, n: int) -> np.ndarray:
    """Index sequence of length ``n``: characters then null padding."""
    if len(text) > n:
        raise ValueError(f"text of length {len(text)} does not fit n={n}: {text!r}")
    table = alphabet.char_to_index()
    out = np.full(n, alphabet.null, dtype=np.int64)
    for i, ch in enumerate(text):
        try:
            out[i] = table[ch]
        except KeyError:
            raise ValueError(f"character {ch!r} is not in the alphabet; normalise first") from None
    return out


def decode(indices, alphabet: Alphabet) -> str:
    """Inverse of :func:`encode`; null symbols are dropped wherever they occur."""
    null, unk = alphabet.null, alphabet.unknown
    chars = []
    for i in np.asarray(indices).tolist():
        if i == null:
            continue
        chars.append(UNK_CHAR if i == unk else alphabet.symbols[i])
    return "".join(chars)


def one_hot(indices, K: int) -> DiffTensor:
    """K x n matrix whose columns are simplex vertices."""
    idx = np.asarray(indices)
    out = np.zeros((K, idx.size))
    out[idx, np.arange(idx.size)] = 1.0
    return DiffTensor(out)


@dataclass(frozen=True)
class Corpus:
    kind: str
    entries: tuple[str, ...]
    mode: str = "synthetic"
    frequencies: dict[str, float] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.entries)


def _truncate_line(line: str, n: int) -> str | None:
    if len(line) <= n:
        return line
    cut = line.rfind(" ", 0, n + 1)
    if cut <= 0:
        return None
    return line[:cut].rstrip(" ")


def char_frequencies(entries) -> dict[str, float]:
    counts = Counter()
    for e in entries:
        counts.update(e)
    total = sum(counts.values())
    return {ch: c / total for ch, c in sorted(counts.items())} if total else {}


def make_corpus(entries, kind: str, mode: str = "synthetic") -> Corpus:
    entries = tuple(entries)
    if not entries:
        raise ConfigError("corpus is empty after filtering")
    return Corpus(kind, entries, mode, char_frequencies(entries))


def load_corpus(path, kind: str, length_filter: int | None = None, mode: str = "synthetic") -> Corpus:
    """Read one entry per line, normalise, and filter.

    ``kind='word'``: drop entries containing spaces; with ``length_filter``
    keep only entries of exactly that length. ``kind='line'``: entries longer
    than ``length_filter`` are cut at the last word boundary that fits.
    Duplicates are kept so sampling follows corpus frequency.
    """
    if kind not in ("word", "line"):
        raise ValueError(f"unknown corpus kind {kind!r}")
    raw = Path(path).read_text(encoding="utf-8").split("\n")
    entries = []
    for line in raw:
        s = normalize(line, mode)
        if not s:
            continue
        if kind == "word":
            if " " in s or (length_filter is not None and len(s) != length_filter):
                continue
        elif length_filter is not None:
            s = _truncate_line(s, length_filter)
            if not s:
                continue
        entries.append(s)
    if not entries:
        raise ConfigError(f"corpus {path} is empty after filtering (kind={kind}, length={length_filter})")
    return make_corpus(entries, kind, mode)


def sample_real_batch(corpus: Corpus, alphabet: Alphabet, n: int, batch: int,
                      rng: np.random.Generator, dtype=np.float32) -> DiffTensor:
    """``batch`` uniformly drawn corpus entries as one-hot ``batch x K x n``."""
    picks = rng.integers(0, len(corpus.entries), size=batch)
    idx = np.stack([encode(corpus.entries[i], alphabet, n) for i in picks])
    out = np.zeros((batch, alphabet.K, n), dtype=dtype)
    b, pos = np.meshgrid(np.arange(batch), np.arange(n), indexing="ij")
    out[b, idx, pos] = 1
    return DiffTensor(out)


@dataclass(frozen=True)
class CorpusStats:
    frequencies: dict[str, float]
    rank_order: tuple[str, ...]
    suffix: str | None = None
    suffix_fraction: float | None = None


def corpus_stats(corpus: Corpus, suffix: str | None = None) -> CorpusStats:
    freqs = char_frequencies(corpus.entries)
    order = tuple(sorted(freqs, key=lambda ch: (-freqs[ch], ch)))
    frac = None
    if suffix is not None:
        frac = sum(e.endswith(suffix) for e in corpus.entries) / len(corpus.entries)
    return CorpusStats(freqs, order, suffix, frac)
