"""GloVe embeddings: windowed co-occurrence counts factorized with AdaGrad.

Co-occurrence is collected per sentence (windows never cross sentence
boundaries) with the usual 1/d distance weighting, both directions, so the
matrix is symmetric by construction. Training minimizes the weighted
least-squares objective ``sum f(x_ij) (w_i.wt_j + b_i + bt_j - ln x_ij)^2``
over the stored entries, shuffled every epoch. The pure-numpy loss/gradient
functions are the float64 reference the compiled kernel is checked against.
"""

from __future__ import annotations

import logging
import threading
import time

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import _kernels
from .corpus import TokenizedCorpus
from .validation import TrainingDiverged, check_corpus, check_positive, check_positive_int
from .vectors import WordVector
from .vocab import DEFAULT_MIN_COUNT, Vocabulary, build_vocab

logger = logging.getLogger(__name__)

DEFAULT_X_MAX = 100.0
DEFAULT_ALPHA = 0.75
ADAGRAD_EPS = 1e-8


class CooccurrenceMatrix:
    """Sparse symmetric co-occurrence counts over a fixed vocabulary.

    Entries are parallel arrays ``(rows, cols, values)`` sorted by (row, col)
    with no duplicates; every stored weight is positive.
    """

    def __init__(self, rows, cols, values, n_words: int, window: int,
                 symmetric: bool = True):
        self.rows = np.asarray(rows, dtype=np.int32)
        self.cols = np.asarray(cols, dtype=np.int32)
        self.values = np.asarray(values, dtype=np.float64)
        self.n_words = int(n_words)
        self.window = int(window)
        self.symmetric = symmetric

    def __len__(self) -> int:
        return self.values.size

    def scaled(self, factor: float) -> "CooccurrenceMatrix":
        """Entrywise multiple of the matrix (duplicating a corpus rho times
        scales its co-occurrence counts by rho)."""
        return CooccurrenceMatrix(self.rows, self.cols, self.values * factor,
                                  self.n_words, self.window, self.symmetric)

    def toarray(self) -> np.ndarray:
        mat = sparse.coo_matrix((self.values, (self.rows, self.cols)),
                                shape=(self.n_words, self.n_words))
        return mat.toarray()


def _canonical(mat: sparse.coo_matrix, n_words, window, symmetric=True):
    mat.sum_duplicates()
    keep = mat.data > 0
    return CooccurrenceMatrix(mat.row[keep], mat.col[keep], mat.data[keep],
                              n_words, window, symmetric)


def build_cooccurrence(corpus: TokenizedCorpus, vocab: Vocabulary,
                       window: int = 5) -> CooccurrenceMatrix:
    """Count distance-weighted in-vocabulary pairs within each sentence.

    Every ordered pair of in-vocabulary tokens at sentence distance
    ``d <= window`` contributes ``1/d`` to its (center, context) entry.
    Distances are positions in the tokenized sentence, so dropped
    out-of-vocabulary tokens still separate their neighbours.
    """
    check_corpus(corpus)
    window = check_positive_int("window", window)
    id_of = vocab.id_of
    ids: list[int] = []
    sent: list[int] = []
    for s, sentence in enumerate(corpus.sentences()):
        for token in sentence:
            ids.append(id_of.get(token, -1))
            sent.append(s)
    id_arr = np.asarray(ids, dtype=np.int64)
    sent_arr = np.asarray(sent, dtype=np.int64)

    rows_parts, cols_parts, vals_parts = [], [], []
    for d in range(1, window + 1):
        if d >= id_arr.size:
            break
        left = id_arr[:-d]
        right = id_arr[d:]
        mask = (left >= 0) & (right >= 0) & (sent_arr[:-d] == sent_arr[d:])
        if not mask.any():
            continue
        li = left[mask]
        ri = right[mask]
        weight = np.full(li.size, 1.0 / d)
        # both directions in matching order so duplicate summation is
        # identical for (i, j) and (j, i) and the result exactly symmetric
        rows_parts.append(np.concatenate([li, ri]))
        cols_parts.append(np.concatenate([ri, li]))
        vals_parts.append(np.concatenate([weight, weight]))

    V = len(vocab)
    if not rows_parts:
        empty = np.empty(0)
        return CooccurrenceMatrix(empty, empty, empty, V, window)
    mat = sparse.coo_matrix(
        (np.concatenate(vals_parts),
         (np.concatenate(rows_parts), np.concatenate(cols_parts))),
        shape=(V, V))
    return _canonical(mat, V, window)


def glove_weight(x, x_max: float = DEFAULT_X_MAX, alpha: float = DEFAULT_ALPHA):
    """Loss weighting ``(x / x_max)**alpha`` capped at 1 above ``x_max``.

    Accepts scalars or arrays of positive counts; monotone non-decreasing
    and continuous at the cap.
    """
    arr = np.asarray(x, dtype=np.float64)
    out = np.minimum(np.power(arr / x_max, alpha), 1.0)
    if np.ndim(x) == 0:
        return float(out)
    return out


def entry_loss(w_i, wt_j, b_i, b_j, x, x_max=DEFAULT_X_MAX, alpha=DEFAULT_ALPHA) -> float:
    """Weighted squared residual of one co-occurrence entry, in float64."""
    w_i = np.asarray(w_i, dtype=np.float64)
    wt_j = np.asarray(wt_j, dtype=np.float64)
    diff = float(w_i @ wt_j) + float(b_i) + float(b_j) - float(np.log(x))
    return glove_weight(float(x), x_max, alpha) * diff * diff


def entry_gradients(w_i, wt_j, b_i, b_j, x, x_max=DEFAULT_X_MAX, alpha=DEFAULT_ALPHA):
    """Analytic gradients of :func:`entry_loss` w.r.t. ``w_i``, ``wt_j``,
    ``b_i`` and ``b_j`` (in that order)."""
    w_i = np.asarray(w_i, dtype=np.float64)
    wt_j = np.asarray(wt_j, dtype=np.float64)
    diff = float(w_i @ wt_j) + float(b_i) + float(b_j) - float(np.log(x))
    coef = 2.0 * glove_weight(float(x), x_max, alpha) * diff
    return coef * wt_j, coef * w_i, coef, coef


def save_cooccurrence(matrix: CooccurrenceMatrix, path) -> None:
    """Write entries as ``i<TAB>j<TAB>x`` lines sorted by (i, j)."""
    order = np.lexsort((matrix.cols, matrix.rows))
    with open(path, "w", encoding="utf-8") as fh:
        for e in order:
            fh.write("%d\t%d\t%.17g\n"
                     % (matrix.rows[e], matrix.cols[e], matrix.values[e]))


def load_cooccurrence(path, n_words: int | None = None,
                      window: int = 0) -> CooccurrenceMatrix:
    """Read ``i<TAB>j<TAB>x`` triples written by :func:`save_cooccurrence`.

    The triple format stores neither the vocabulary size nor the window, so
    ``n_words`` defaults to the largest id + 1 and ``window`` to 0 (unknown)
    unless the caller passes them. Duplicated keys are summed; the symmetry
    flag is recomputed from the data.
    """
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 3:
                raise ValueError("%s:%d: expected 'i<TAB>j<TAB>x', got %r"
                                 % (path, lineno, line.rstrip("\n")))
            try:
                i, j, x = int(fields[0]), int(fields[1]), float(fields[2])
            except ValueError:
                raise ValueError("%s:%d: malformed co-occurrence entry %r"
                                 % (path, lineno, line.rstrip("\n"))) from None
            if i < 0 or j < 0:
                raise ValueError("%s:%d: negative word id" % (path, lineno))
            if not x > 0:
                raise ValueError("%s:%d: co-occurrence weight must be > 0, got %g"
                                 % (path, lineno, x))
            rows.append(i)
            cols.append(j)
            vals.append(x)
    if n_words is None:
        n_words = max(max(rows, default=-1), max(cols, default=-1)) + 1
    elif rows and max(max(rows), max(cols)) >= n_words:
        raise ValueError("%s: word id exceeds n_words=%d" % (path, n_words))
    mat = sparse.coo_matrix((vals, (rows, cols)), shape=(n_words, n_words))
    mat.sum_duplicates()
    symmetric = int((mat != mat.T).nnz) == 0
    return _canonical(mat, n_words, window, symmetric)


class GloveEmbedding(BaseEstimator, TransformerMixin):
    """GloVe word embeddings fit by per-entry AdaGrad.

    Parameters (``w_i``, ``wt_j`` and both biases) start uniform in
    ``[-0.5/dim, 0.5/dim]``; squared-gradient accumulators start at zero and
    each step is ``lr * g / sqrt(G + 1e-8)`` after accumulating ``g^2``.
    Entries are shuffled every epoch with the seeded generator. The exposed
    word vector is ``w_i + wt_i``, the sum of the two roles. ``workers > 1``
    updates shared parameters lock-free, trading bit-reproducibility for
    speed exactly as in :class:`~dupvec.sgns.SgnsEmbedding`.
    """

    def __init__(self, dim=100, window=5, x_max=DEFAULT_X_MAX, alpha=DEFAULT_ALPHA,
                 epochs=25, initial_lr=0.05, min_count=DEFAULT_MIN_COUNT,
                 seed=1, workers=1):
        self.dim = dim
        self.window = window
        self.x_max = x_max
        self.alpha = alpha
        self.epochs = epochs
        self.initial_lr = initial_lr
        self.min_count = min_count
        self.seed = seed
        self.workers = workers

    def _validate_params(self):
        check_positive_int("dim", self.dim)
        check_positive_int("window", self.window)
        check_positive_int("epochs", self.epochs)
        check_positive_int("min_count", self.min_count)
        check_positive_int("workers", self.workers)
        check_positive("x_max", self.x_max)
        check_positive("initial_lr", self.initial_lr)
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1], got %r" % (self.alpha,))

    def fit(self, corpus: TokenizedCorpus, y=None, repeats: int = 1,
            vocab: Vocabulary | None = None,
            cooccurrence: CooccurrenceMatrix | None = None):
        """Build (or accept) the co-occurrence matrix and train on it.

        ``repeats`` trains as if the corpus were ``repeats`` identical copies
        concatenated: vocabulary counts and co-occurrence weights are scaled
        by ``repeats``, which matches physical duplication up to float
        rounding. A supplied ``cooccurrence`` matrix is used as-is.
        """
        self._validate_params()
        check_corpus(corpus)
        repeats = check_positive_int("repeats", repeats)
        t_start = time.perf_counter()
        if vocab is None:
            vocab = build_vocab(corpus, min_count=self.min_count, repeats=repeats)
        if cooccurrence is None:
            cooccurrence = build_cooccurrence(corpus, vocab, self.window)
            if repeats > 1:
                cooccurrence = cooccurrence.scaled(repeats)
        return self._fit_matrix(cooccurrence, vocab, repeats, t_start)

    def _fit_matrix(self, matrix: CooccurrenceMatrix, vocab: Vocabulary,
                    repeats: int, t_start: float):
        V = len(vocab)
        if matrix.n_words != V:
            raise ValueError("co-occurrence matrix covers %d words, vocabulary has %d"
                             % (matrix.n_words, V))
        n_entries = len(matrix)
        if n_entries == 0:
            raise ValueError("co-occurrence matrix is empty; nothing to train on")

        rng = np.random.Generator(np.random.PCG64(self.seed))
        scale = 1.0 / self.dim
        w = (rng.random((V, self.dim)) - 0.5) * scale
        wt = (rng.random((V, self.dim)) - 0.5) * scale
        b = (rng.random(V) - 0.5) * scale
        bt = (rng.random(V) - 0.5) * scale
        gw = np.zeros((V, self.dim))
        gwt = np.zeros((V, self.dim))
        gb = np.zeros(V)
        gbt = np.zeros(V)

        logx = np.log(matrix.values)
        fweight = glove_weight(matrix.values, self.x_max, self.alpha)
        rows = matrix.rows
        cols = matrix.cols
        workers = min(self.workers, n_entries)
        bounds = np.linspace(0, n_entries, workers + 1).astype(np.int64)
        lr = float(self.initial_lr)
        loss_history = []

        def run_worker(k, order, out):
            out[k] = _kernels.glove_epoch(
                order, bounds[k], bounds[k + 1], rows, cols, logx, fweight,
                w, wt, b, bt, gw, gwt, gb, gbt, lr, ADAGRAD_EPS)

        for epoch in range(self.epochs):
            order = rng.permutation(n_entries).astype(np.int64)
            results = [0.0] * workers
            if workers == 1:
                run_worker(0, order, results)
            else:
                threads = [threading.Thread(target=run_worker, args=(k, order, results))
                           for k in range(workers)]
                for t in threads:
                    t.start()
                for t in threads:
                    t.join()
            epoch_loss = float(sum(results))
            loss_history.append(epoch_loss)
            if not np.isfinite(epoch_loss):
                raise TrainingDiverged(
                    "non-finite loss %r at epoch %d (lr=%g over %d entries); "
                    "try a smaller initial_lr" % (epoch_loss, epoch, lr, n_entries))
            logger.debug("epoch %d/%d loss=%.4g", epoch + 1, self.epochs, epoch_loss)

        if not all(np.isfinite(a).all() for a in (w, wt, b, bt)):
            raise TrainingDiverged("non-finite weights after training")

        self.vocab_ = vocab
        self.cooccurrence_ = matrix
        self.main_vectors_ = w
        self.context_vectors_ = wt
        self.bias_ = b
        self.context_bias_ = bt
        self.input_vectors_ = (w + wt).astype(np.float32)
        self.train_stats_ = {
            "entries": n_entries,
            "loss_per_epoch": loss_history,
            "repeats": repeats,
            "workers": workers,
            "wall_time_sec": time.perf_counter() - t_start,
        }
        return self

    def _check_fitted(self):
        if not hasattr(self, "input_vectors_"):
            raise NotFittedError("this GloveEmbedding instance is not fitted yet")

    def vocab_tokens(self) -> list[str]:
        self._check_fitted()
        return list(self.vocab_.tokens)

    def word_vector(self, token: str) -> WordVector:
        """Summed main and context rows for in-vocabulary tokens, otherwise a
        flagged zero vector."""
        self._check_fitted()
        wid = self.vocab_.id_of.get(token)
        if wid is None:
            return WordVector(np.zeros(self.dim, dtype=np.float32), False)
        return WordVector(self.input_vectors_[wid].copy(), True)

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


def train_glove(matrix: CooccurrenceMatrix, vocab: Vocabulary,
                **params) -> GloveEmbedding:
    """Fit a :class:`GloveEmbedding` directly on a prebuilt matrix."""
    model = GloveEmbedding(**params)
    model._validate_params()
    return model._fit_matrix(matrix, vocab, repeats=1, t_start=time.perf_counter())
