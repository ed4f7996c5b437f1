"""Text vector-file interchange: the ``V dim`` header format used by common
pretrained embedding releases.

Loading yields a :class:`WordVectors` lookup that answers out-of-vocabulary
queries with a flagged zero vector; subword information is never
reconstructed from a text file.
"""

from __future__ import annotations

import json
from typing import NamedTuple

import numpy as np


class WordVector(NamedTuple):
    """A word's embedding plus whether the model actually covers the word."""

    vector: np.ndarray
    has_vector: bool


class VectorFormatError(ValueError):
    """Malformed vector file; carries the offending line number."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__("%s:%d: %s" % (path, lineno, message))
        self.path = str(path)
        self.lineno = lineno


class WordVectors:
    """An immutable token -> vector table with the zero-vector OOV policy."""

    def __init__(self, tokens: list[str], matrix: np.ndarray):
        if len(tokens) != matrix.shape[0]:
            raise ValueError("token list and matrix row count disagree")
        self.tokens = list(tokens)
        self.matrix = np.asarray(matrix, dtype=np.float32)
        self.index = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def word_vector(self, token: str) -> WordVector:
        row = self.index.get(token)
        if row is None:
            return WordVector(np.zeros(self.dim, dtype=np.float32), False)
        return WordVector(self.matrix[row], True)


def save_vec(model, path, fmt: str = "%.8g") -> None:
    """Write a model's per-token vectors in the text interchange format.

    ``model`` is anything with ``vocab_tokens()`` and ``word_vector()`` (a
    fitted embedding) or a :class:`WordVectors`. First line is ``V dim``,
    then one ``token v1 ... vdim`` line per word. Eight significant digits
    keep float32 round-trips well inside 1e-6 per component.
    """
    if isinstance(model, WordVectors):
        tokens, rows = model.tokens, model.matrix
    else:
        tokens = model.vocab_tokens()
        rows = (model.word_vector(t).vector for t in tokens)
    dim = model.dim
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("%d %d\n" % (len(tokens), dim))
        for token, vector in zip(tokens, rows):
            fh.write(token)
            for value in vector:
                fh.write(" ")
                fh.write(fmt % value)
            fh.write("\n")


def save_model(model, path) -> None:
    """Persist a fitted embedding: vectors via :func:`save_vec` plus a
    ``<path>.meta`` sidecar of ``key=value`` lines covering the algorithm,
    the full config, corpus counts and training stats."""
    save_vec(model, path)
    meta = dict(model.get_params())
    meta.setdefault("algorithm", getattr(model, "algorithm", "glove"))
    meta["vocab_size"] = len(model.vocab_.tokens)
    meta["corpus_tokens"] = model.vocab_.total_tokens
    for key, value in model.train_stats_.items():
        meta["stats.%s" % key] = value
    with open("%s.meta" % path, "w", encoding="utf-8") as fh:
        for key in sorted(meta):
            fh.write("%s=%s\n" % (key, json.dumps(meta[key]) if isinstance(meta[key], (list, dict)) else meta[key]))


def load_vec(path) -> WordVectors:
    """Read a text vector file into a :class:`WordVectors` lookup.

    Raises :class:`VectorFormatError` with a line number on a bad header, a
    row of the wrong arity, a non-numeric component, or a short file.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise VectorFormatError(path, 1, "expected header 'V dim', got %r" % header.strip())
        n_rows, dim = int(parts[0]), int(parts[1])
        tokens = []
        matrix = np.empty((n_rows, dim), dtype=np.float32)
        lineno = 1
        for lineno, line in enumerate(fh, start=2):
            if lineno - 2 >= n_rows:
                if line.strip():
                    raise VectorFormatError(path, lineno, "more rows than the header announced")
                continue
            fields = line.split()
            if len(fields) != dim + 1:
                raise VectorFormatError(
                    path, lineno, "expected %d components, got %d" % (dim, len(fields) - 1))
            try:
                matrix[lineno - 2] = np.asarray(fields[1:], dtype=np.float32)
            except ValueError:
                raise VectorFormatError(path, lineno, "non-numeric vector component")
            tokens.append(fields[0])
    if len(tokens) != n_rows:
        raise VectorFormatError(
            path, lineno + 1, "header announced %d rows, file has %d" % (n_rows, len(tokens)))
    return WordVectors(tokens, matrix)
