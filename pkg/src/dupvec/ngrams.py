"""Character n-gram extraction and bucket hashing for subword vectors."""

from __future__ import annotations

import numpy as np

BOUNDARY_START = "<"
BOUNDARY_END = ">"

FNV1A_OFFSET_BASIS = 2166136261
FNV1A_PRIME = 16777619
_UINT32_MASK = 0xFFFFFFFF


def extract_ngrams(word: str, nmin: int = 3, nmax: int = 6) -> list[str]:
    """All length-``nmin``..``nmax`` substrings of the boundary-wrapped word.

    The word is wrapped as ``<word>`` and substrings are listed shortest
    length first, left to right within each length. The wrapped word itself
    appears in the list when its length falls in range; callers that keep a
    separate whole-word vector should treat that entry like any other n-gram
    (the whole-word entry lives in the vocabulary, not the bucket space).
    """
    if not word:
        raise ValueError("cannot extract n-grams from an empty word")
    if nmin > nmax or nmin < 1:
        raise ValueError("need 1 <= nmin <= nmax, got (%d, %d)" % (nmin, nmax))
    wrapped = BOUNDARY_START + word + BOUNDARY_END
    grams = []
    for n in range(nmin, nmax + 1):
        for start in range(len(wrapped) - n + 1):
            grams.append(wrapped[start:start + n])
    return grams


def fnv1a_32(data: bytes) -> int:
    """32-bit FNV-1a hash; ``fnv1a_32(b"")`` is the offset basis 2166136261."""
    h = FNV1A_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV1A_PRIME) & _UINT32_MASK
    return h


def hash_ngram(gram: str, buckets: int) -> int:
    """Stable bucket index for an n-gram: FNV-1a over its UTF-8 bytes, mod ``buckets``."""
    if not gram:
        raise ValueError("cannot hash an empty n-gram")
    if buckets < 1:
        raise ValueError("buckets must be >= 1")
    return fnv1a_32(gram.encode("utf-8")) % buckets


def ngram_bucket_ids(word: str, nmin: int, nmax: int, buckets: int) -> list[int]:
    """Bucket indices of every n-gram of ``word``, in extraction order."""
    return [hash_ngram(g, buckets) for g in extract_ngrams(word, nmin, nmax)]


def build_subword_index(tokens: list[str], nmin: int, nmax: int,
                        buckets: int) -> tuple[np.ndarray, np.ndarray]:
    """Flattened per-word n-gram bucket lists for a whole vocabulary.

    Returns ``(ids, offsets)`` where word ``w``'s bucket indices are
    ``ids[offsets[w]:offsets[w + 1]]``. Words too short to produce any n-gram
    get an empty range.
    """
    offsets = np.zeros(len(tokens) + 1, dtype=np.int64)
    flat: list[int] = []
    for w, token in enumerate(tokens):
        if len(token) + 2 >= nmin:
            flat.extend(ngram_bucket_ids(token, nmin, nmax, buckets))
        offsets[w + 1] = len(flat)
    return np.asarray(flat, dtype=np.int32), offsets
