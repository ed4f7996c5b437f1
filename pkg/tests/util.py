"""Reference implementations used as test oracles.

Everything here is deliberately written in plain Python/numpy, independent of
the package's compiled kernels, so tests can pin the documented training
semantics (rng stream, update order, rounding) bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

from dupvec import (
    build_cooccurrence,
    build_subword_index,
    build_unigram_table,
    build_vocab,
    discard_prob,
    encode_sentences,
    glove_weight,
)
from dupvec._kernels import seed_state

M64 = (1 << 64) - 1
LR_FLOOR = 1e-4


def lcg_next(state: int) -> int:
    return (state * 25214903917 + 11) & M64


def uniform24(state: int) -> float:
    return ((state >> 16) & 0xFFFFFF) / 16777216.0


def sigmoid_clamped(x: float) -> float:
    if x > 30.0:
        return 1.0 - 1e-13
    if x < -30.0:
        return 1e-13
    return 1.0 / (1.0 + math.exp(-x))


def fnv1a_32_reference(data: bytes) -> int:
    """Byte-at-a-time FNV-1a, written out longhand."""
    value = 2166136261
    for byte in data:
        value = value ^ byte
        value = (value * 16777619) & 0xFFFFFFFF
    return value


def brute_force_tau(rank_a, rank_b):
    """Tau-b by direct pair enumeration; returns (tau, degenerate)."""
    n = len(rank_a)
    c = d = ta = tb = 0
    for i in range(n):
        for j in range(i + 1, n):
            sa = (rank_a[i] > rank_a[j]) - (rank_a[i] < rank_a[j])
            sb = (rank_b[i] > rank_b[j]) - (rank_b[i] < rank_b[j])
            if sa == 0 and sb == 0:
                continue
            if sa == 0:
                ta += 1
            elif sb == 0:
                tb += 1
            elif sa == sb:
                c += 1
            else:
                d += 1
    denom = math.sqrt((c + d + ta) * (c + d + tb))
    if denom == 0:
        return 0.0, True
    return (c - d) / denom, False


def topic_cosine_gap(model, topic_a, topic_b) -> float:
    """Mean within-topic cosine minus mean cross-topic cosine."""
    rows_a = np.array([model.word_vector(t).vector for t in topic_a
                       if model.word_vector(t).has_vector], dtype=np.float64)
    rows_b = np.array([model.word_vector(t).vector for t in topic_b
                       if model.word_vector(t).has_vector], dtype=np.float64)

    def normalize(rows):
        return rows / np.linalg.norm(rows, axis=1, keepdims=True)

    na, nb = normalize(rows_a), normalize(rows_b)

    def mean_offdiag(sims):
        return (sims.sum() - np.trace(sims)) / (sims.size - sims.shape[0])

    within = 0.5 * (mean_offdiag(na @ na.T) + mean_offdiag(nb @ nb.T))
    cross = float(np.mean(na @ nb.T))
    return float(within - cross)


def _word_parts(vocab, algorithm, ngram_min, ngram_max, buckets):
    V = len(vocab)
    if algorithm != "fasttext":
        return [[w] for w in range(V)], 0
    bucket_ids, bucket_off = build_subword_index(vocab.tokens, ngram_min,
                                                 ngram_max, buckets)
    parts = []
    for w in range(V):
        parts.append([w] + [V + int(b)
                            for b in bucket_ids[bucket_off[w]:bucket_off[w + 1]]])
    return parts, buckets


def _mirror_step(parts, target, syn0, syn1, syn_ng, V, table, negatives, lr,
                 state):
    dim = syn0.shape[1]
    hidden = np.zeros(dim, dtype=np.float32)
    for p in parts:
        hidden += syn0[p] if p < V else syn_ng[p - V]
    inv = np.float32(1.0) / np.float32(len(parts))
    hidden *= inv
    grad = np.zeros(dim, dtype=np.float32)
    table_len = len(table)
    for k in range(negatives + 1):
        if k == 0:
            out = target
            label = np.float32(1.0)
        else:
            out = target
            for _ in range(100):
                state = lcg_next(state)
                cand = int(table[(state >> 16) % table_len])
                if cand != target:
                    out = cand
                    break
            if out == target:
                continue
            label = np.float32(0.0)
        dot = np.float32(0.0)
        for dcomp in range(dim):
            dot = np.float32(dot + np.float32(hidden[dcomp] * syn1[out, dcomp]))
        sig = np.float32(sigmoid_clamped(float(dot)))
        g = np.float32((label - sig) * lr)
        grad += g * syn1[out]
        syn1[out] += g * hidden
    delta = grad * inv
    for p in parts:
        if p < V:
            syn0[p] += delta
        else:
            syn_ng[p - V] += delta
    return state


def sgns_mirror_fit(corpus, *, algorithm="word2vec", mode="skipgram", dim=8,
                    window=2, epochs=1, negatives=3, initial_lr=0.025,
                    min_count=1, subsample=0.0, ngram_min=3, ngram_max=4,
                    buckets=64, table_size=997, table_power=0.75, seed=1,
                    repeats=1):
    """Train with the documented single-worker semantics, kernels unused.

    Returns ``(syn0, syn1, syn_ng)`` for bitwise comparison against
    ``SgnsEmbedding`` fitted with the same arguments.
    """
    vocab = build_vocab(corpus, min_count=min_count, repeats=repeats)
    ids, offsets = encode_sentences(corpus, vocab)
    table = build_unigram_table(vocab, power=table_power, size=table_size).entries
    V = len(vocab)
    retained = vocab.retained_tokens
    discard = np.array(
        [discard_prob(int(c), retained, subsample) if subsample > 0 else 0.0
         for c in vocab.counts], dtype=np.float32)
    parts, n_bucket_rows = _word_parts(vocab, algorithm, ngram_min, ngram_max,
                                       buckets)

    rng = np.random.Generator(np.random.PCG64(seed))
    syn0 = ((rng.random((V, dim)) - 0.5) / dim).astype(np.float32)
    syn_ng = ((rng.random((n_bucket_rows, dim)) - 0.5) / dim).astype(np.float32)
    syn1 = np.zeros((V, dim), dtype=np.float32)

    total = epochs * repeats * int(ids.size)
    min_lr = initial_lr * LR_FLOOR
    state = int(seed_state(seed, 0))
    processed = 0
    cbow = mode == "cbow"
    n_sentences = offsets.size - 1

    for _ in range(epochs):
        for _ in range(repeats):
            for s in range(n_sentences):
                kept = []
                for p in range(int(offsets[s]), int(offsets[s + 1])):
                    wid = int(ids[p])
                    processed += 1
                    if subsample > 0:
                        state = lcg_next(state)
                        if uniform24(state) < float(discard[wid]):
                            continue
                    kept.append(wid)
                lr = np.float32(initial_lr
                                - (initial_lr - min_lr) * (processed / total))
                for c in range(len(kept)):
                    state = lcg_next(state)
                    reach = ((state >> 16) % window) + 1
                    lo = max(0, c - reach)
                    hi = min(len(kept) - 1, c + reach)
                    if cbow:
                        gather = [part for cc in range(lo, hi + 1) if cc != c
                                  for part in parts[kept[cc]]]
                        if not gather:
                            continue
                        state = _mirror_step(gather, kept[c], syn0, syn1,
                                             syn_ng, V, table, negatives, lr,
                                             state)
                    else:
                        gather = parts[kept[c]]
                        for cc in range(lo, hi + 1):
                            if cc == c:
                                continue
                            state = _mirror_step(gather, kept[cc], syn0, syn1,
                                                 syn_ng, V, table, negatives,
                                                 lr, state)
    return syn0, syn1, syn_ng


def glove_mirror_fit(corpus, *, dim=8, window=3, x_max=100.0, alpha=0.75,
                     epochs=2, initial_lr=0.05, min_count=1, seed=1,
                     repeats=1):
    """AdaGrad training with the documented semantics, kernels unused.

    Returns ``(w, wt, b, bt, loss_history)`` for bitwise comparison against
    ``GloveEmbedding``.
    """
    vocab = build_vocab(corpus, min_count=min_count, repeats=repeats)
    matrix = build_cooccurrence(corpus, vocab, window)
    values = matrix.values * repeats if repeats > 1 else matrix.values
    rows, cols = matrix.rows, matrix.cols
    n = values.size
    V = len(vocab)
    eps = 1e-8

    rng = np.random.Generator(np.random.PCG64(seed))
    scale = 1.0 / dim
    w = (rng.random((V, dim)) - 0.5) * scale
    wt = (rng.random((V, dim)) - 0.5) * scale
    b = (rng.random(V) - 0.5) * scale
    bt = (rng.random(V) - 0.5) * scale
    gw = np.zeros((V, dim))
    gwt = np.zeros((V, dim))
    gb = np.zeros(V)
    gbt = np.zeros(V)

    logx = np.log(values)
    fweight = glove_weight(values, x_max, alpha)
    losses = []
    for _ in range(epochs):
        order = rng.permutation(n).astype(np.int64)
        loss = 0.0
        for e in order:
            i, j = int(rows[e]), int(cols[e])
            diff = b[i] + bt[j] - logx[e]
            for d in range(dim):
                diff += w[i, d] * wt[j, d]
            f = fweight[e]
            loss += f * diff * diff
            coef = 2.0 * f * diff
            for d in range(dim):
                gi = coef * wt[j, d]
                gj = coef * w[i, d]
                gw[i, d] += gi * gi
                gwt[j, d] += gj * gj
                w[i, d] -= initial_lr * gi / math.sqrt(gw[i, d] + eps)
                wt[j, d] -= initial_lr * gj / math.sqrt(gwt[j, d] + eps)
            gb[i] += coef * coef
            gbt[j] += coef * coef
            b[i] -= initial_lr * coef / math.sqrt(gb[i] + eps)
            bt[j] -= initial_lr * coef / math.sqrt(gbt[j] + eps)
        losses.append(loss)
    return w, wt, b, bt, losses
