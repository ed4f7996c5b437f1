"""Word2Vec and FastText embeddings trained with skip-gram / CBOW negative sampling.

The estimator follows the scikit-learn protocol: hyperparameters in
``__init__``, training in :meth:`SgnsEmbedding.fit`, fitted state in
underscore-suffixed attributes and ``transform`` mapping token lists to mean
sentence vectors. The update applied per positive/negative target is the
exact gradient of the logistic pair loss in :func:`pair_loss`; the pure-numpy
gradient functions here are the reference the compiled kernels are checked
against.
"""

from __future__ import annotations

import logging
import threading
import time

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import _kernels
from .corpus import TokenizedCorpus
from .ngrams import build_subword_index, ngram_bucket_ids
from .validation import TrainingDiverged, check_choice, check_corpus, check_positive, check_positive_int
from .vectors import WordVector
from .vocab import (
    DEFAULT_MIN_COUNT,
    DEFAULT_SUBSAMPLE,
    DEFAULT_TABLE_POWER,
    DEFAULT_TABLE_SIZE,
    UnigramTable,
    Vocabulary,
    build_unigram_table,
    build_vocab,
    discard_prob,
)

logger = logging.getLogger(__name__)

ALGORITHMS = ("word2vec", "fasttext")
MODES = ("cbow", "skipgram")
LR_FLOOR_FRACTION = 1e-4  # learning rate decays linearly to initial_lr * this


def pair_loss(center: np.ndarray, positive: np.ndarray, negatives: np.ndarray) -> float:
    """Logistic loss of one (input, positive, negatives) configuration.

    ``-log sigmoid(u.v) - sum_k log sigmoid(-u_k.v)`` with ``v`` the input
    vector, ``u`` the positive output vector and ``u_k`` the negative output
    vectors. Evaluated in float64; serves as the analytic reference for the
    training kernels.
    """
    v = np.asarray(center, dtype=np.float64)
    u = np.asarray(positive, dtype=np.float64)
    un = np.atleast_2d(np.asarray(negatives, dtype=np.float64))
    loss = np.logaddexp(0.0, -u @ v)
    loss += np.logaddexp(0.0, un @ v).sum()
    return float(loss)


def pair_gradients(center, positive, negatives):
    """Analytic gradients of :func:`pair_loss` w.r.t. the input vector, the
    positive output vector and each negative output vector."""
    v = np.asarray(center, dtype=np.float64)
    u = np.asarray(positive, dtype=np.float64)
    un = np.atleast_2d(np.asarray(negatives, dtype=np.float64))
    sig_pos = 1.0 / (1.0 + np.exp(-(u @ v)))
    sig_neg = 1.0 / (1.0 + np.exp(-(un @ v)))
    grad_center = (sig_pos - 1.0) * u + sig_neg @ un
    grad_positive = (sig_pos - 1.0) * v
    grad_negatives = np.outer(sig_neg, v)
    return grad_center, grad_positive, grad_negatives


def encode_sentences(corpus: TokenizedCorpus, vocab: Vocabulary):
    """Map sentences to in-vocabulary id arrays, dropping other tokens.

    Returns ``(ids, offsets)``: the concatenated id stream and per-sentence
    start offsets (sentences left empty after filtering are dropped).
    """
    ids: list[int] = []
    offsets = [0]
    id_of = vocab.id_of
    for sentence in corpus.sentences():
        n_before = len(ids)
        for token in sentence:
            wid = id_of.get(token)
            if wid is not None:
                ids.append(wid)
        if len(ids) > n_before:
            offsets.append(len(ids))
    return np.asarray(ids, dtype=np.int32), np.asarray(offsets, dtype=np.int64)


class SgnsEmbedding(BaseEstimator, TransformerMixin):
    """Static word embeddings via skip-gram or CBOW with negative sampling.

    Parameters
    ----------
    algorithm : "word2vec" or "fasttext"
        FastText composes each word's input vector from the word row plus
        hashed character n-gram bucket rows (mean over the parts).
    mode : "skipgram" or "cbow"
        Skip-gram predicts each context word from the center word; CBOW
        predicts the center word from the averaged context.
    workers : int
        1 gives the deterministic, bit-reproducible contract. More workers
        update the shared matrices lock-free from GIL-released threads, so
        results are no longer bit-stable run to run.

    The learning rate decays linearly from ``initial_lr`` to
    ``initial_lr * 1e-4`` over the scheduled updates (epochs x in-vocabulary
    positions x repeats). Input vectors start uniform in ``[-0.5/dim,
    0.5/dim]``, output vectors at zero.
    """

    def __init__(self, algorithm="word2vec", mode="skipgram", dim=100, window=5,
                 epochs=5, negatives=5, initial_lr=0.025,
                 min_count=DEFAULT_MIN_COUNT, subsample=DEFAULT_SUBSAMPLE,
                 ngram_min=3, ngram_max=6, buckets=2_000_000,
                 table_size=DEFAULT_TABLE_SIZE, table_power=DEFAULT_TABLE_POWER,
                 seed=1, workers=1):
        self.algorithm = algorithm
        self.mode = mode
        self.dim = dim
        self.window = window
        self.epochs = epochs
        self.negatives = negatives
        self.initial_lr = initial_lr
        self.min_count = min_count
        self.subsample = subsample
        self.ngram_min = ngram_min
        self.ngram_max = ngram_max
        self.buckets = buckets
        self.table_size = table_size
        self.table_power = table_power
        self.seed = seed
        self.workers = workers

    def _validate_params(self):
        check_choice("algorithm", self.algorithm, ALGORITHMS)
        check_choice("mode", self.mode, MODES)
        check_positive_int("dim", self.dim)
        check_positive_int("window", self.window)
        check_positive_int("epochs", self.epochs)
        check_positive_int("negatives", self.negatives)
        check_positive_int("min_count", self.min_count)
        check_positive_int("workers", self.workers)
        check_positive("initial_lr", self.initial_lr)
        if self.subsample < 0:
            raise ValueError("subsample must be >= 0 (0 disables subsampling)")
        if self.ngram_min > self.ngram_max or self.ngram_min < 1:
            raise ValueError("need 1 <= ngram_min <= ngram_max")
        if self.algorithm == "fasttext":
            check_positive_int("buckets", self.buckets)

    def fit(self, corpus: TokenizedCorpus, y=None, repeats: int = 1,
            vocab: Vocabulary | None = None, table: UnigramTable | None = None):
        """Train on a tokenized corpus.

        ``repeats`` trains as if the corpus were ``repeats`` identical copies
        concatenated, without materializing them: vocabulary counts are scaled
        and every epoch streams the sentences ``repeats`` times, which is
        bit-identical to training on the physically duplicated corpus.
        """
        self._validate_params()
        check_corpus(corpus)
        repeats = check_positive_int("repeats", repeats)
        t_start = time.perf_counter()

        if vocab is None:
            vocab = build_vocab(corpus, min_count=self.min_count, repeats=repeats)
        ids, offsets = encode_sentences(corpus, vocab)
        if ids.size == 0:
            raise ValueError("no trainable tokens left after min_count filtering")
        if table is None:
            table = build_unigram_table(vocab, power=self.table_power, size=self.table_size)

        V = len(vocab)
        retained = vocab.retained_tokens
        if self.subsample > 0:
            discard = np.array(
                [discard_prob(int(c), retained, self.subsample) for c in vocab.counts],
                dtype=np.float32)
        else:
            discard = np.zeros(V, dtype=np.float32)

        if self.algorithm == "fasttext":
            bucket_ids, bucket_off = build_subword_index(
                vocab.tokens, self.ngram_min, self.ngram_max, self.buckets)
            parts_ids = np.empty(V + bucket_ids.size, dtype=np.int64)
            parts_off = np.empty(V + 1, dtype=np.int64)
            pos = 0
            for w in range(V):
                parts_off[w] = pos
                parts_ids[pos] = w
                pos += 1
                for q in range(bucket_off[w], bucket_off[w + 1]):
                    parts_ids[pos] = V + bucket_ids[q]
                    pos += 1
            parts_off[V] = pos
            n_bucket_rows = self.buckets
        else:
            parts_ids = np.arange(V, dtype=np.int64)
            parts_off = np.arange(V + 1, dtype=np.int64)
            n_bucket_rows = 0
        max_parts = int(np.diff(parts_off).max())

        rng = np.random.Generator(np.random.PCG64(self.seed))
        syn0 = ((rng.random((V, self.dim)) - 0.5) / self.dim).astype(np.float32)
        syn_ng = ((rng.random((n_bucket_rows, self.dim)) - 0.5) / self.dim).astype(np.float32)
        syn1 = np.zeros((V, self.dim), dtype=np.float32)

        n_sentences = offsets.size - 1
        workers = min(self.workers, n_sentences)
        bounds = np.linspace(0, n_sentences, workers + 1).astype(np.int64)
        totals = [int(self.epochs) * repeats * int(offsets[bounds[w + 1]] - offsets[bounds[w]])
                  for w in range(workers)]
        states = [_kernels.seed_state(self.seed, w) for w in range(workers)]
        processed = [0] * workers
        pair_total = 0
        initial_lr = float(self.initial_lr)
        min_lr = initial_lr * LR_FLOOR_FRACTION
        loss_history = []

        def run_worker(w, out):
            out[w] = _kernels.sgns_epoch(
                ids, offsets, bounds[w], bounds[w + 1], repeats,
                syn0, syn1, syn_ng, parts_ids, parts_off, max_parts,
                table.entries, discard, self.subsample > 0,
                self.mode == "cbow", self.window, self.negatives,
                initial_lr, min_lr, totals[w], processed[w], states[w])

        for epoch in range(self.epochs):
            results = [None] * workers
            if workers == 1:
                run_worker(0, results)
            else:
                threads = [threading.Thread(target=run_worker, args=(w, results))
                           for w in range(workers)]
                for t in threads:
                    t.start()
                for t in threads:
                    t.join()
            epoch_loss = 0.0
            for w, (state, done, pairs, loss) in enumerate(results):
                states[w] = _kernels.as_state(state)
                processed[w] = done
                pair_total += int(pairs)
                epoch_loss += float(loss)
            loss_history.append(epoch_loss)
            if not np.isfinite(epoch_loss):
                raise TrainingDiverged(
                    "non-finite loss %r at epoch %d (algorithm=%s mode=%s lr=%g); "
                    "try a smaller initial_lr" %
                    (epoch_loss, epoch, self.algorithm, self.mode, initial_lr))
            logger.debug("epoch %d/%d loss=%.4g", epoch + 1, self.epochs, epoch_loss)

        if not (np.isfinite(syn0).all() and np.isfinite(syn1).all()
                and np.isfinite(syn_ng).all()):
            raise TrainingDiverged("non-finite weights after training")

        self.vocab_ = vocab
        self.unigram_table_ = table
        self.input_vectors_ = syn0
        self.output_vectors_ = syn1
        self.ngram_vectors_ = syn_ng if self.algorithm == "fasttext" else None
        self.train_stats_ = {
            "scheduled_updates": sum(totals),
            "processed_positions": sum(processed),
            "trained_pairs": pair_total,
            "loss_per_epoch": loss_history,
            "repeats": repeats,
            "workers": workers,
            "wall_time_sec": time.perf_counter() - t_start,
        }
        return self

    def _check_fitted(self):
        if not hasattr(self, "input_vectors_"):
            raise NotFittedError("this SgnsEmbedding instance is not fitted yet")

    def vocab_tokens(self) -> list[str]:
        self._check_fitted()
        return list(self.vocab_.tokens)

    def word_vector(self, token: str) -> WordVector:
        """Embedding for ``token``.

        word2vec: the input-matrix row for in-vocabulary tokens, otherwise a
        flagged zero vector. fasttext: the mean of the whole-word row (when in
        vocabulary) and the word's n-gram bucket rows, which is defined for
        out-of-vocabulary words too.
        """
        self._check_fitted()
        wid = self.vocab_.id_of.get(token)
        if self.algorithm != "fasttext":
            if wid is None:
                return WordVector(np.zeros(self.dim, dtype=np.float32), False)
            return WordVector(self.input_vectors_[wid].copy(), True)
        total = np.zeros(self.dim, dtype=np.float32)
        n_parts = 0
        if wid is not None:
            total += self.input_vectors_[wid]
            n_parts += 1
        if token:
            for bucket in ngram_bucket_ids(token, self.ngram_min, self.ngram_max, self.buckets):
                total += self.ngram_vectors_[bucket]
                n_parts += 1
        if n_parts == 0:
            return WordVector(total, False)
        return WordVector(total / np.float32(n_parts), True)

    def transform(self, sentences) -> np.ndarray:
        """Mean word vector per token list; rows of zeros for empty coverage."""
        self._check_fitted()
        out = np.zeros((len(sentences), self.dim), dtype=np.float32)
        for row, tokens in enumerate(sentences):
            looked_up = [self.word_vector(t) for t in tokens]
            covered = [wv.vector for wv in looked_up if wv.has_vector]
            if covered:
                out[row] = np.mean(covered, axis=0)
        return out
