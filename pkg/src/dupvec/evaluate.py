"""Sentence-similarity ranking evaluation scored with Kendall's tau-b.

An evaluation item pairs one reference sentence with five candidate
sentences and a human gold ranking. Sentences are embedded as the
unweighted mean of their word vectors, candidates are ranked by cosine
similarity to the reference, and each item's ranking is compared to gold
with the tie-corrected tau-b statistic; the headline score is the mean tau
over items.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .corpus import PipelineConfig, preprocess

N_CANDIDATES = 5


@dataclass
class EvalItem:
    """One reference sentence, five candidates and the gold ranks.

    ``gold_rank[k]`` is the human rank of candidate ``k`` (1 = most similar
    to the reference); equal ranks express ties.
    """

    reference: str
    candidates: list[str]
    gold_rank: list[int]

    def __post_init__(self):
        if len(self.candidates) != N_CANDIDATES:
            raise ValueError("expected %d candidates, got %d"
                             % (N_CANDIDATES, len(self.candidates)))
        if len(self.gold_rank) != N_CANDIDATES:
            raise ValueError("expected %d gold ranks, got %d"
                             % (N_CANDIDATES, len(self.gold_rank)))
        for rank in self.gold_rank:
            if not isinstance(rank, int) or not 1 <= rank <= N_CANDIDATES:
                raise ValueError("gold ranks must be integers in 1..%d, got %r"
                                 % (N_CANDIDATES, rank))


@dataclass
class EvalSet:
    items: list[EvalItem]

    def __post_init__(self):
        if not self.items:
            raise ValueError("evaluation set must contain at least one item")

    def __len__(self) -> int:
        return len(self.items)


class SentenceEmbedding(NamedTuple):
    vector: np.ndarray
    coverage: float


class RankingResult(NamedTuple):
    ranks: list[int]
    similarities: list[float]
    tied_pairs: int
    degenerate: bool


class TauStatistic(NamedTuple):
    tau: float
    degenerate: bool


@dataclass
class TauResult:
    """Evaluation summary: one tau per item plus their arithmetic mean.

    ``per_item_coverage`` is the covered-token fraction over each item's six
    sentences; ``n_degenerate`` counts items whose candidate similarities
    were all equal, which contribute tau 0.
    """

    per_item_tau: list[float]
    mean_tau: float
    per_item_coverage: list[float]
    n_degenerate: int


def load_evalset(path) -> EvalSet:
    """Read a ``{"items": [...]}`` json evaluation file."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or "items" not in payload:
        raise ValueError("%s: expected a json object with an 'items' list" % (path,))
    items = []
    for k, raw in enumerate(payload["items"]):
        try:
            items.append(EvalItem(reference=raw["reference"],
                                  candidates=list(raw["candidates"]),
                                  gold_rank=list(raw["gold_rank"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError("%s: item %d invalid: %s" % (path, k, exc)) from None
    return EvalSet(items=items)


def save_evalset(evalset: EvalSet, path) -> None:
    payload = {"items": [{"reference": item.reference,
                          "candidates": item.candidates,
                          "gold_rank": item.gold_rank}
                         for item in evalset.items]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def sentence_tokens(text: str, config: PipelineConfig | None = None) -> list[str]:
    """Tokenize one evaluation sentence with the corpus pipeline."""
    corpus = preprocess([text], config)
    return [token for sentence in corpus.documents[0] for token in sentence]


def sentence_embedding(model, tokens) -> SentenceEmbedding:
    """Unweighted mean of the covered tokens' word vectors.

    Coverage is the fraction of tokens with a defined vector; an empty or
    fully uncovered token list embeds to the zero vector with coverage 0.
    """
    total = np.zeros(model.dim, dtype=np.float32)
    covered = 0
    for token in tokens:
        wv = model.word_vector(token)
        if wv.has_vector:
            total += wv.vector
            covered += 1
    if covered == 0:
        return SentenceEmbedding(total, 0.0)
    return SentenceEmbedding(total / np.float32(covered), covered / len(tokens))


def cosine(a, b) -> float:
    """Cosine similarity; 0 by convention when either vector has norm 0."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    norm = float(np.linalg.norm(a)) * float(np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return float(a @ b / norm)


def rank_candidates(model, item: EvalItem,
                    config: PipelineConfig | None = None) -> RankingResult:
    """Rank the item's candidates by descending cosine to the reference.

    Exact similarity ties are broken by candidate index (lower index wins).
    ``tied_pairs`` counts candidate pairs with exactly equal similarity; the
    result is degenerate when every similarity is equal (for instance a
    reference with no covered tokens), leaving the ranking to the tie-break
    alone.
    """
    config = config or PipelineConfig()
    reference = sentence_embedding(model, sentence_tokens(item.reference, config))
    sims = [cosine(reference.vector,
                   sentence_embedding(model, sentence_tokens(text, config)).vector)
            for text in item.candidates]
    order = sorted(range(N_CANDIDATES), key=lambda k: (-sims[k], k))
    ranks = [0] * N_CANDIDATES
    for position, k in enumerate(order):
        ranks[k] = position + 1
    tied = sum(1 for i in range(N_CANDIDATES) for j in range(i + 1, N_CANDIDATES)
               if sims[i] == sims[j])
    return RankingResult(ranks, sims, tied, tied == N_CANDIDATES * (N_CANDIDATES - 1) // 2)


def kendall_tau(rank_a, rank_b) -> TauStatistic:
    """Tie-corrected Kendall tau-b between two rankings.

    ``(C - D) / sqrt((C + D + T_a) (C + D + T_b))`` where C and D count
    concordant and discordant pairs, T_a / T_b count pairs tied only in one
    ranking, and pairs tied in both are excluded. A ranking with all values
    equal makes the statistic undefined; that returns 0 with the degenerate
    flag set.
    """
    n = len(rank_a)
    if len(rank_b) != n:
        raise ValueError("rankings differ in length: %d vs %d" % (n, len(rank_b)))
    if n < 2:
        raise ValueError("need at least 2 ranked elements, got %d" % n)
    concordant = discordant = tied_a = tied_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            da = rank_a[i] - rank_a[j]
            db = rank_b[i] - rank_b[j]
            if da == 0 and db == 0:
                continue
            if da == 0:
                tied_a += 1
            elif db == 0:
                tied_b += 1
            elif (da > 0) == (db > 0):
                concordant += 1
            else:
                discordant += 1
    denom = math.sqrt((concordant + discordant + tied_a)
                      * (concordant + discordant + tied_b))
    if denom == 0.0:
        return TauStatistic(0.0, True)
    return TauStatistic((concordant - discordant) / denom, False)


def evaluate(model, evalset: EvalSet,
             config: PipelineConfig | None = None) -> TauResult:
    """Score a model on an evaluation set.

    Each item contributes the tau-b between its model ranking and the gold
    ranking; degenerate items (all candidate similarities equal, so the
    model expresses no preference) contribute 0 and are counted separately.
    """
    config = config or PipelineConfig()
    taus = []
    coverages = []
    n_degenerate = 0
    for item in evalset.items:
        ranking = rank_candidates(model, item, config)
        if ranking.degenerate:
            taus.append(0.0)
            n_degenerate += 1
        else:
            taus.append(kendall_tau(ranking.ranks, item.gold_rank).tau)
        covered = total = 0
        for text in [item.reference] + item.candidates:
            for token in sentence_tokens(text, config):
                total += 1
                if model.word_vector(token).has_vector:
                    covered += 1
        coverages.append(covered / total if total else 0.0)
    return TauResult(per_item_tau=taus,
                     mean_tau=float(np.mean(taus)),
                     per_item_coverage=coverages,
                     n_degenerate=n_degenerate)
