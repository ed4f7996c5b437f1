"""Vocabulary construction, frequent-word subsampling and the negative-sampling table.

All embedding trainers share one vocabulary layout: ids are assigned by
descending corpus frequency (ties broken lexicographically), tokens below
``min_count`` are dropped, and negative samples are drawn from a table whose
slot shares follow ``count ** 0.75``.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import TokenizedCorpus

DEFAULT_TABLE_POWER = 0.75
DEFAULT_TABLE_SIZE = 10_000_000
DEFAULT_MIN_COUNT = 5
DEFAULT_SUBSAMPLE = 1e-3


class VocabularyError(ValueError):
    pass


@dataclass
class Vocabulary:
    tokens: list[str]                 # id -> token
    counts: np.ndarray                # id -> corpus frequency (int64)
    total_tokens: int                 # all corpus tokens, including dropped ones
    min_count: int
    id_of: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.id_of = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.id_of

    @property
    def retained_tokens(self) -> int:
        """Total corpus occurrences of the retained vocabulary."""
        return int(self.counts.sum())


def build_vocab(corpus: TokenizedCorpus, min_count: int = DEFAULT_MIN_COUNT,
                repeats: int = 1) -> Vocabulary:
    """Count the corpus and keep tokens with frequency >= ``min_count``.

    ``repeats`` scales every raw count as if the corpus had been concatenated
    that many times, which lets a duplication sweep build the vocabulary of a
    rho-fold corpus without materializing it. Ids are assigned in descending
    frequency order, ties broken lexicographically.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1, got %d" % min_count)
    if repeats < 1:
        raise ValueError("repeats must be >= 1, got %d" % repeats)
    raw = Counter()
    total = 0
    for sentence in corpus.sentences():
        raw.update(sentence)
        total += len(sentence)
    kept = sorted(
        ((token, count * repeats) for token, count in raw.items()
         if count * repeats >= min_count),
        key=lambda item: (-item[1], item[0]),
    )
    if not kept:
        raise VocabularyError("corpus too small for min_count=%d" % min_count)
    tokens = [t for t, _ in kept]
    counts = np.array([c for _, c in kept], dtype=np.int64)
    return Vocabulary(tokens=tokens, counts=counts,
                      total_tokens=total * repeats, min_count=min_count)


@dataclass
class UnigramTable:
    """Word ids repeated proportionally to ``count ** power``."""

    entries: np.ndarray               # int32 word ids
    power: float = DEFAULT_TABLE_POWER
    size: int = DEFAULT_TABLE_SIZE

    def __len__(self) -> int:
        return len(self.entries)


def build_unigram_table(vocab: Vocabulary, power: float = DEFAULT_TABLE_POWER,
                        size: int = DEFAULT_TABLE_SIZE) -> UnigramTable:
    """Fill the sampling table by cumulative shares of ``count ** power``.

    Word ``i`` occupies the slot range between the rounded cumulative shares
    of ids ``i-1`` and ``i``, so its slot count is within one of
    ``size * count[i]**power / sum_j count[j]**power``.
    """
    if power <= 0:
        raise ValueError("power must be > 0, got %r" % power)
    if size < len(vocab):
        raise ValueError("table size %d smaller than vocabulary %d" % (size, len(vocab)))
    weights = np.power(vocab.counts.astype(np.float64), power)
    cumshare = np.cumsum(weights) / weights.sum()
    bounds = np.floor(cumshare * size + 0.5).astype(np.int64)
    bounds[-1] = size
    slots = np.diff(bounds, prepend=0)
    entries = np.repeat(np.arange(len(vocab), dtype=np.int32), slots)
    return UnigramTable(entries=entries, power=power, size=size)


def discard_prob(word_count: int, total: int, threshold: float) -> float:
    """Probability of dropping one occurrence of a word during training.

    With relative frequency ``f = word_count / total``, the word is discarded
    with probability ``max(0, 1 - sqrt(threshold / f))``; words at or below
    the threshold frequency are never discarded.
    """
    if not 0 < word_count <= total:
        raise ValueError("need 0 < word_count <= total")
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    f = word_count / total
    return max(0.0, 1.0 - math.sqrt(threshold / f))


def sample_negative(table: UnigramTable, rng: np.random.Generator,
                    exclude: int | None = None) -> int:
    """Draw one word id from the table, redrawing while it equals ``exclude``."""
    entries = table.entries
    if len(entries) == 0:
        raise ValueError("unigram table is empty")
    attempts = 0
    while True:
        drawn = int(entries[int(rng.integers(len(entries)))])
        if exclude is None or drawn != exclude:
            return drawn
        attempts += 1
        # Only verify the degenerate single-id case after repeated misses, so
        # the common path never scans the whole table.
        if attempts >= 64 and np.all(entries == exclude):
            raise ValueError("unigram table contains only the excluded id %d" % exclude)


def save_vocab(vocab: Vocabulary, path) -> None:
    """Write ``token<TAB>count`` lines in id order, after a ``#total=... #min_count=...`` header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#total=%d #min_count=%d\n" % (vocab.total_tokens, vocab.min_count))
        for token, count in zip(vocab.tokens, vocab.counts):
            fh.write("%s\t%d\n" % (token, count))


def load_vocab(path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        m = re.match(r"#total=(\d+) #min_count=(\d+)\s*$", header)
        if not m:
            raise ValueError("%s: missing vocabulary header line" % path)
        total, min_count = int(m.group(1)), int(m.group(2))
        tokens, counts = [], []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                token, count = line.rstrip("\n").split("\t")
                counts.append(int(count))
            except ValueError:
                raise ValueError("%s:%d: expected 'token<TAB>count'" % (path, lineno))
            tokens.append(token)
    return Vocabulary(tokens=tokens, counts=np.array(counts, dtype=np.int64),
                      total_tokens=total, min_count=min_count)
