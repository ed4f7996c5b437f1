"""Small input-validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

from .corpus import TokenizedCorpus


class TrainingDiverged(RuntimeError):
    """Training hit a non-finite loss; carries diagnostic context."""


def check_positive_int(name: str, value, minimum: int = 1) -> int:
    if not float(value).is_integer() or int(value) < minimum:
        raise ValueError("%s must be an integer >= %d, got %r" % (name, minimum, value))
    return int(value)


def check_positive(name: str, value) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError("%s must be > 0, got %r" % (name, value))
    return value


def check_choice(name: str, value, options) -> None:
    if value not in options:
        raise ValueError("%s must be one of %s, got %r" % (name, sorted(options), value))


def check_corpus(corpus) -> TokenizedCorpus:
    if not isinstance(corpus, TokenizedCorpus):
        raise TypeError("expected a TokenizedCorpus, got %r" % type(corpus).__name__)
    if corpus.duplication_factor < 1:
        raise ValueError("corpus duplication_factor must be >= 1")
    return corpus
