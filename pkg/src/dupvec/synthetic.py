"""Synthetic fixtures with known structure: planted-topic corpora and a
matching evaluation set.

The planted corpus draws every sentence from one of two disjoint topic
lexicons, so any useful embedding must place within-topic words closer than
cross-topic words. The synthetic evaluation set grades candidates by their
fraction of reference-topic words, giving gold rankings a mean-vector model
can recover. These are test and demo fixtures, not natural language.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources

from .corpus import TokenizedCorpus
from .evaluate import EvalItem, EvalSet

TOPIC_PREFIXES = ("reda", "blub")
EVALSET_RESOURCE = "data/synthetic_evalset.json"

# topic-A fractions for gold ranks 1..5 of an 8-token candidate
_MIX_LEVELS = (8, 6, 4, 2, 0)


def topic_lexicons(vocab_per_topic: int = 50) -> tuple[list[str], list[str]]:
    """Two disjoint word lists, e.g. ``reda00..`` and ``blub00..``."""
    first, second = TOPIC_PREFIXES
    return ([("%s%02d" % (first, i)) for i in range(vocab_per_topic)],
            [("%s%02d" % (second, i)) for i in range(vocab_per_topic)])


@dataclass
class PlantedCorpus:
    corpus: TokenizedCorpus
    topic_a: list[str]
    topic_b: list[str]


def planted_corpus(n_sentences: int = 400, sentence_length: int = 8,
                   vocab_per_topic: int = 50, seed: int = 0) -> PlantedCorpus:
    """A corpus whose sentences never mix the two topic lexicons.

    Sentences alternate topics (so both are equally frequent) and sample
    words uniformly with replacement from their topic's lexicon.
    """
    topic_a, topic_b = topic_lexicons(vocab_per_topic)
    rng = random.Random(seed)
    sentences = []
    for s in range(n_sentences):
        lexicon = topic_a if s % 2 == 0 else topic_b
        sentences.append(rng.choices(lexicon, k=sentence_length))
    return PlantedCorpus(
        corpus=TokenizedCorpus(documents=[sentences], duplication_factor=1),
        topic_a=topic_a, topic_b=topic_b)


def synthetic_evalset(n_items: int = 30, vocab_per_topic: int = 50,
                      seed: int = 7) -> EvalSet:
    """An evaluation set over the planted lexicons with derivable gold ranks.

    Each reference is drawn from one topic; its five candidates contain 8,
    6, 4, 2 and 0 reference-topic words (the rest from the other topic), and
    the gold rank follows that overlap. Candidate positions are shuffled so
    rank and index do not coincide.
    """
    topic_a, topic_b = topic_lexicons(vocab_per_topic)
    rng = random.Random(seed)
    items = []
    for k in range(n_items):
        own, other = (topic_a, topic_b) if k % 2 == 0 else (topic_b, topic_a)
        reference = " ".join(rng.choices(own, k=8))
        by_rank = []
        for n_own in _MIX_LEVELS:
            tokens = rng.choices(own, k=n_own) + rng.choices(other, k=8 - n_own)
            rng.shuffle(tokens)
            by_rank.append(" ".join(tokens))
        order = list(range(len(by_rank)))
        rng.shuffle(order)
        candidates = [""] * len(by_rank)
        gold_rank = [0] * len(by_rank)
        for rank_minus_1, position in enumerate(order):
            candidates[position] = by_rank[rank_minus_1]
            gold_rank[position] = rank_minus_1 + 1
        items.append(EvalItem(reference=reference, candidates=candidates,
                              gold_rank=gold_rank))
    return EvalSet(items=items)


def shipped_evalset_path() -> str:
    """Filesystem path of the synthetic evaluation set bundled with the
    package."""
    return str(resources.files("dupvec").joinpath(EVALSET_RESOURCE))
