import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dupvec import (
    GloveEmbedding,
    TokenizedCorpus,
    build_cooccurrence,
    build_vocab,
    duplicate,
    entry_gradients,
    entry_loss,
    glove_weight,
    load_cooccurrence,
    planted_corpus,
    save_cooccurrence,
    train_glove,
)

from util import glove_mirror_fit

BASE = dict(dim=8, window=3, x_max=10.0, alpha=0.75, epochs=2,
            initial_lr=0.05, min_count=1, seed=4)


@pytest.fixture(scope="module")
def tiny_corpus():
    return planted_corpus(n_sentences=30, sentence_length=8,
                          vocab_per_topic=8, seed=2).corpus


def corpus_of(*sentences):
    return TokenizedCorpus(documents=[[list(s) for s in sentences]])


class TestBuildCooccurrence:
    def entry(self, matrix, vocab, a, b):
        i, j = vocab.id_of[a], vocab.id_of[b]
        mask = (matrix.rows == i) & (matrix.cols == j)
        return matrix.values[mask.nonzero()[0]].sum()

    def test_adjacent_pair_weight_one(self):
        corpus = corpus_of(["a", "b"])
        vocab = build_vocab(corpus, min_count=1)
        matrix = build_cooccurrence(corpus, vocab, window=5)
        assert self.entry(matrix, vocab, "a", "b") == 1.0
        assert self.entry(matrix, vocab, "b", "a") == 1.0

    def test_distance_two_weight_half(self):
        corpus = corpus_of(["a", "b", "c"])
        vocab = build_vocab(corpus, min_count=1)
        matrix = build_cooccurrence(corpus, vocab, window=5)
        assert self.entry(matrix, vocab, "a", "c") == 0.5

    def test_oov_token_still_separates_neighbours(self):
        corpus = corpus_of(["a", "x", "b"])
        vocab = build_vocab(corpus_of(["a", "b"]), min_count=1)
        matrix = build_cooccurrence(corpus, vocab, window=5)
        assert self.entry(matrix, vocab, "a", "b") == 0.5

    def test_sentence_boundary_blocks_pairs(self):
        corpus = corpus_of(["a"], ["b"])
        vocab = build_vocab(corpus, min_count=1)
        matrix = build_cooccurrence(corpus, vocab, window=5)
        assert len(matrix) == 0

    def test_window_limits_distance(self):
        corpus = corpus_of(["a", "x", "x", "b"])
        vocab = build_vocab(corpus, min_count=1)
        matrix = build_cooccurrence(corpus, vocab, window=2)
        assert self.entry(matrix, vocab, "a", "b") == 0.0

    def test_exactly_symmetric(self, tiny_corpus):
        vocab = build_vocab(tiny_corpus, min_count=1)
        matrix = build_cooccurrence(tiny_corpus, vocab, window=4)
        dense = matrix.toarray()
        assert np.array_equal(dense, dense.T)

    def test_entries_sorted_and_positive(self, tiny_corpus):
        vocab = build_vocab(tiny_corpus, min_count=1)
        matrix = build_cooccurrence(tiny_corpus, vocab, window=4)
        keys = matrix.rows.astype(np.int64) * len(vocab) + matrix.cols
        assert np.all(np.diff(keys) > 0)
        assert np.all(matrix.values > 0)

    def test_scaled_multiplies_values_only(self, tiny_corpus):
        vocab = build_vocab(tiny_corpus, min_count=1)
        matrix = build_cooccurrence(tiny_corpus, vocab, window=4)
        doubled = matrix.scaled(2)
        assert np.array_equal(doubled.values, matrix.values * 2)
        assert np.array_equal(doubled.rows, matrix.rows)
        assert len(doubled) == len(matrix)


class TestDuplicationLinearity:
    @pytest.mark.parametrize("rho", [2, 4])
    def test_duplicate_matrix_is_rho_times_original(self, tiny_corpus, rho):
        vocab = build_vocab(tiny_corpus, min_count=1)
        base = build_cooccurrence(tiny_corpus, vocab, window=4)
        dup = build_cooccurrence(duplicate(tiny_corpus, rho), vocab, window=4)
        assert np.array_equal(dup.rows, base.rows)
        assert np.array_equal(dup.cols, base.cols)
        assert np.allclose(dup.values, rho * base.values, rtol=1e-9, atol=0)


class TestGloveWeight:
    def test_pinned_value_below_cap(self):
        assert glove_weight(5.0, x_max=10.0, alpha=0.75) == pytest.approx(
            0.5946035575013605, abs=1e-12)

    def test_alpha_one_is_linear(self):
        assert glove_weight(25.0, x_max=100.0, alpha=1.0) == pytest.approx(0.25)

    def test_cap_at_x_max(self):
        assert glove_weight(100.0, x_max=100.0) == 1.0
        assert glove_weight(250.0, x_max=100.0) == 1.0

    def test_vectorized(self):
        out = glove_weight(np.array([1.0, 100.0, 400.0]), x_max=100.0, alpha=0.5)
        assert out == pytest.approx([0.1, 1.0, 1.0], abs=1e-15)

    @given(st.floats(min_value=1e-6, max_value=1e6),
           st.floats(min_value=0.1, max_value=1.0))
    @settings(max_examples=80, deadline=None)
    def test_bounded_unit_interval(self, x, alpha):
        w = glove_weight(x, x_max=100.0, alpha=alpha)
        assert 0.0 < w <= 1.0

    def test_monotone(self):
        xs = np.linspace(0.5, 300, 200)
        ws = glove_weight(xs, x_max=100.0)
        assert np.all(np.diff(ws) >= 0)


class TestEntryGradients:
    def test_against_central_differences(self):
        rng = np.random.default_rng(1)
        h = 1e-6
        for _ in range(10):
            dim = int(rng.integers(2, 6))
            w_i = rng.normal(size=dim)
            wt_j = rng.normal(size=dim)
            b_i, b_j = rng.normal(), rng.normal()
            x = float(rng.uniform(0.1, 50.0))
            gw, gwt, gb, gbt = entry_gradients(w_i, wt_j, b_i, b_j, x, x_max=10.0)
            for d in range(dim):
                step = np.zeros(dim)
                step[d] = h
                num = (entry_loss(w_i + step, wt_j, b_i, b_j, x, x_max=10.0)
                       - entry_loss(w_i - step, wt_j, b_i, b_j, x, x_max=10.0)) / (2 * h)
                assert num == pytest.approx(gw[d], rel=1e-4, abs=1e-7)
            num_b = (entry_loss(w_i, wt_j, b_i + h, b_j, x, x_max=10.0)
                     - entry_loss(w_i, wt_j, b_i - h, b_j, x, x_max=10.0)) / (2 * h)
            assert num_b == pytest.approx(gb, rel=1e-4, abs=1e-7)
            assert gb == gbt

    def test_gradient_structure(self):
        # dJ/dw_i must be coef * wt_j with coef = 2 f(x) (prediction - ln x)
        w_i, wt_j = np.array([0.5, -0.25]), np.array([0.125, 1.0])
        b_i, b_j, x = 0.1, -0.2, 4.0
        gw, gwt, gb, _ = entry_gradients(w_i, wt_j, b_i, b_j, x, x_max=10.0, alpha=0.75)
        diff = float(w_i @ wt_j) + b_i + b_j - math.log(x)
        coef = 2.0 * glove_weight(x, 10.0, 0.75) * diff
        assert np.allclose(gw, coef * wt_j)
        assert np.allclose(gwt, coef * w_i)
        assert gb == pytest.approx(coef)


class TestSaveLoadCooccurrence:
    def test_round_trip(self, tiny_corpus, tmp_path):
        vocab = build_vocab(tiny_corpus, min_count=1)
        matrix = build_cooccurrence(tiny_corpus, vocab, window=4)
        path = tmp_path / "cooc.tsv"
        save_cooccurrence(matrix, path)
        loaded = load_cooccurrence(path, n_words=len(vocab), window=4)
        assert np.array_equal(loaded.rows, matrix.rows)
        assert np.array_equal(loaded.cols, matrix.cols)
        assert np.allclose(loaded.values, matrix.values, rtol=0, atol=0)
        assert loaded.symmetric

    def test_malformed_line_reports_position(self, tmp_path):
        path = tmp_path / "cooc.tsv"
        path.write_text("0\t1\t1.0\nnot a triple\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":2"):
            load_cooccurrence(path)

    def test_non_positive_weight_rejected(self, tmp_path):
        path = tmp_path / "cooc.tsv"
        path.write_text("0\t1\t0.0\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":1"):
            load_cooccurrence(path)


class TestKernelMatchesReference:
    """The AdaGrad kernel must agree bit for bit with the plain-Python
    reference under the single-worker contract."""

    def check(self, corpus, repeats=1, **overrides):
        params = {**BASE, **overrides}
        model = GloveEmbedding(**params).fit(corpus, repeats=repeats)
        w, wt, b, bt, losses = glove_mirror_fit(corpus, repeats=repeats, **params)
        assert np.array_equal(model.main_vectors_, w)
        assert np.array_equal(model.context_vectors_, wt)
        assert np.array_equal(model.bias_, b)
        assert np.array_equal(model.context_bias_, bt)
        assert model.train_stats_["loss_per_epoch"] == pytest.approx(losses, rel=1e-12)

    def test_single_worker_training(self, tiny_corpus):
        self.check(tiny_corpus)

    def test_streamed_repeats(self, tiny_corpus):
        self.check(tiny_corpus, repeats=2)


class TestTraining:
    def test_single_pair_converges_to_log_count(self):
        corpus = corpus_of(["a", "b"])
        params = {**BASE, "dim": 2, "epochs": 500, "initial_lr": 0.1}
        model = GloveEmbedding(**params).fit(corpus)
        i, j = model.vocab_.id_of["a"], model.vocab_.id_of["b"]
        predicted = (float(model.main_vectors_[i] @ model.context_vectors_[j])
                     + model.bias_[i] + model.context_bias_[j])
        assert abs(predicted - math.log(1.0)) < 1e-3

    def test_loss_non_increasing_after_warmup(self, tiny_corpus):
        params = {**BASE, "epochs": 25}
        model = GloveEmbedding(**params).fit(tiny_corpus)
        losses = model.train_stats_["loss_per_epoch"]
        tail = losses[len(losses) // 5:]
        assert all(b <= a * (1 + 1e-9) for a, b in zip(tail, tail[1:]))

    def test_determinism(self, tiny_corpus):
        a = GloveEmbedding(**BASE).fit(tiny_corpus)
        b = GloveEmbedding(**BASE).fit(tiny_corpus)
        assert np.array_equal(a.input_vectors_, b.input_vectors_)

    def test_seed_changes_result(self, tiny_corpus):
        a = GloveEmbedding(**BASE).fit(tiny_corpus)
        params = {**BASE, "seed": 5}
        b = GloveEmbedding(**params).fit(tiny_corpus)
        assert not np.array_equal(a.input_vectors_, b.input_vectors_)

    def test_final_vectors_are_sum_of_both_matrices(self, tiny_corpus):
        model = GloveEmbedding(**BASE).fit(tiny_corpus)
        want = (model.main_vectors_ + model.context_vectors_).astype(np.float32)
        assert np.array_equal(model.input_vectors_, want)

    def test_repeats_scales_stored_matrix_exactly(self, tiny_corpus):
        base = GloveEmbedding(**BASE).fit(tiny_corpus)
        scaled = GloveEmbedding(**BASE).fit(tiny_corpus, repeats=2)
        assert np.array_equal(scaled.cooccurrence_.values,
                              base.cooccurrence_.values * 2)

    def test_train_glove_helper(self, tiny_corpus):
        vocab = build_vocab(tiny_corpus, min_count=1)
        matrix = build_cooccurrence(tiny_corpus, vocab, window=3)
        model = train_glove(matrix, vocab, dim=8, epochs=2, seed=4)
        assert model.input_vectors_.shape == (len(vocab), 8)


@pytest.fixture(scope="module")
def model(tiny_corpus):
    params = {**BASE, "epochs": 3}
    return GloveEmbedding(**params).fit(tiny_corpus)


class TestModelInterface:
    def test_word_vector_in_vocab(self, model):
        got = model.word_vector("reda00")
        assert got.has_vector and got.vector.shape == (8,)

    def test_oov_is_flagged_zero(self, model):
        got = model.word_vector("unseen")
        assert not got.has_vector and not got.vector.any()

    def test_transform(self, model):
        rows = model.transform([["reda00", "unseen"]])
        assert rows.shape == (1, 8)
        assert np.allclose(rows[0], model.word_vector("reda00").vector)


class TestValidation:
    def test_matrix_vocab_size_mismatch(self, tiny_corpus):
        vocab = build_vocab(tiny_corpus, min_count=1)
        matrix = build_cooccurrence(tiny_corpus, vocab, window=3)
        small = build_vocab(corpus_of(["reda00", "reda00"]), min_count=1)
        with pytest.raises(ValueError, match="covers"):
            GloveEmbedding(**BASE).fit(tiny_corpus, vocab=small, cooccurrence=matrix)

    def test_empty_matrix_rejected(self):
        corpus = corpus_of(["a"], ["b"])
        with pytest.raises(ValueError, match="empty"):
            GloveEmbedding(**BASE).fit(corpus)

    def test_bad_dim(self, tiny_corpus):
        params = {**BASE, "dim": 0}
        with pytest.raises(ValueError):
            GloveEmbedding(**params).fit(tiny_corpus)

    def test_bad_epochs(self, tiny_corpus):
        params = {**BASE, "epochs": 0}
        with pytest.raises(ValueError):
            GloveEmbedding(**params).fit(tiny_corpus)

    def test_unfitted_raises(self):
        from sklearn.exceptions import NotFittedError
        with pytest.raises(NotFittedError):
            GloveEmbedding(**BASE).word_vector("a")
