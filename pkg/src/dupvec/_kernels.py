"""Numba-compiled inner loops for the embedding trainers.

Hot paths only: plain arrays in, plain numbers out. All randomness inside the
kernels comes from an explicit 64-bit linear congruential generator so runs
are bit-reproducible for a fixed seed and exactly repeatable across platforms.
The kernels release the GIL, which is what makes the lock-free multi-worker
training mode possible from Python threads.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Same multiplier/increment as java.util.Random; 48 usable bits per step.
_LCG_MULT = np.uint64(25214903917)
_LCG_INC = np.uint64(11)
_U16 = np.uint64(16)
_U24_MASK = np.uint64(0xFFFFFF)
_U24_DENOM = np.float64(16777216.0)

MAX_NEGATIVE_REDRAWS = 100


def seed_state(seed: int, stream: int = 0) -> np.uint64:
    """Initial LCG state for a worker stream, decorrelated via splitmix64."""
    mask = 0xFFFFFFFFFFFFFFFF
    z = (int(seed) + int(stream) * 0x9E3779B97F4A7C15 + 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return np.uint64(z ^ (z >> 31))


def as_state(value) -> np.uint64:
    """Re-wrap a state returned from a kernel as unsigned 64-bit.

    Kernel returns box as plain Python ints that can look negative; feeding
    one back in unwrapped would dispatch a signed specialization whose shifts
    follow a different stream.
    """
    return np.uint64(int(value) & 0xFFFFFFFFFFFFFFFF)


@njit(inline="always")
def _lcg_next(state):
    return state * _LCG_MULT + _LCG_INC


@njit(inline="always")
def _uniform24(state):
    # 24-bit mantissa uniform in [0, 1)
    return np.float64((state >> _U16) & _U24_MASK) / _U24_DENOM


@njit(inline="always")
def _sigmoid(x):
    if x > 30.0:
        return 1.0 - 1e-13
    if x < -30.0:
        return 1e-13
    return 1.0 / (1.0 + math.exp(-x))


@njit(inline="always")
def _log_sigmoid(x):
    # log(sigmoid(x)), stable for large |x|
    if x >= 0.0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


@njit(nogil=True, cache=True)
def sgns_epoch(ids, offsets, sent_lo, sent_hi, repeats,
               syn0, syn1, syn_ng,
               parts_ids, parts_off, max_parts,
               table, discard, subsample_on,
               cbow, window, negatives,
               initial_lr, min_lr, total_scheduled, processed, rng_state):
    """One epoch of negative-sampling training over a sentence range.

    Word ids below V index ``syn0``; part ids at V and above index
    ``syn_ng[part - V]`` (hashed subword buckets). The input side of every
    update is the mean of the part rows and the gradient is split evenly back
    onto them, so a vocabulary whose words have no subword parts trains
    exactly like plain word2vec.

    Returns ``(rng_state, processed, pairs, loss)``; ``processed`` counts
    scheduled updates (every in-vocabulary position, subsampled or not) and
    drives the linear learning-rate decay.
    """
    V = syn0.shape[0]
    dim = syn0.shape[1]
    table_len = np.uint64(table.shape[0])
    uwindow = np.uint64(window)

    max_sent = 0
    for s in range(sent_lo, sent_hi):
        length = np.int64(offsets[s + 1] - offsets[s])
        if length > max_sent:
            max_sent = length
    kept = np.empty(max_sent, dtype=np.int64)
    gather = np.empty(max(2 * window, 1) * max_parts, dtype=np.int64)
    hidden = np.empty(dim, dtype=np.float32)
    grad = np.empty(dim, dtype=np.float32)

    pairs = np.int64(0)
    loss = 0.0
    lr = np.float32(initial_lr)

    for _ in range(repeats):
        for s in range(sent_lo, sent_hi):
            start = np.int64(offsets[s])
            end = np.int64(offsets[s + 1])
            n_kept = 0
            for p in range(start, end):
                wid = ids[p]
                processed += 1
                if subsample_on:
                    rng_state = _lcg_next(rng_state)
                    if _uniform24(rng_state) < discard[wid]:
                        continue
                kept[n_kept] = wid
                n_kept += 1
            frac = np.float64(processed) / np.float64(total_scheduled)
            lr = np.float32(initial_lr - (initial_lr - min_lr) * frac)

            for c in range(n_kept):
                rng_state = _lcg_next(rng_state)
                reach = np.int64((rng_state >> _U16) % uwindow) + 1
                lo = c - reach
                hi = c + reach
                if lo < 0:
                    lo = 0
                if hi >= n_kept:
                    hi = n_kept - 1
                center = kept[c]

                if cbow:
                    # hidden = mean over the parts of every context word
                    n_parts = 0
                    for cc in range(lo, hi + 1):
                        if cc == c:
                            continue
                        wid = kept[cc]
                        for q in range(parts_off[wid], parts_off[wid + 1]):
                            gather[n_parts] = parts_ids[q]
                            n_parts += 1
                    if n_parts == 0:
                        continue
                    rng_state, loss, added = _train_step(
                        gather, n_parts, center, syn0, syn1, syn_ng, V, dim,
                        table, table_len, negatives, lr, hidden, grad,
                        rng_state, loss)
                    pairs += added
                else:
                    p_lo = parts_off[center]
                    p_hi = parts_off[center + 1]
                    n_parts = np.int64(p_hi - p_lo)
                    for q in range(n_parts):
                        gather[q] = parts_ids[p_lo + q]
                    for cc in range(lo, hi + 1):
                        if cc == c:
                            continue
                        rng_state, loss, added = _train_step(
                            gather, n_parts, kept[cc], syn0, syn1, syn_ng, V,
                            dim, table, table_len, negatives, lr, hidden,
                            grad, rng_state, loss)
                        pairs += added
    return rng_state, processed, pairs, loss


@njit(nogil=True, inline="never")
def _train_step(parts, n_parts, target, syn0, syn1, syn_ng, V, dim,
                table, table_len, negatives, lr, hidden, grad, rng_state, loss):
    """One positive target plus ``negatives`` sampled targets against the
    mean of the part rows. Returns updated ``(rng_state, loss, 1)``."""
    for d in range(dim):
        hidden[d] = np.float32(0.0)
    for q in range(n_parts):
        p = parts[q]
        if p < V:
            for d in range(dim):
                hidden[d] += syn0[p, d]
        else:
            row = p - V
            for d in range(dim):
                hidden[d] += syn_ng[row, d]
    inv = np.float32(1.0) / np.float32(n_parts)
    for d in range(dim):
        hidden[d] *= inv
        grad[d] = np.float32(0.0)

    for k in range(negatives + 1):
        if k == 0:
            out = target
            label = np.float32(1.0)
        else:
            out = target
            for _ in range(MAX_NEGATIVE_REDRAWS):
                rng_state = _lcg_next(rng_state)
                cand = table[np.int64((rng_state >> _U16) % table_len)]
                if cand != target:
                    out = np.int64(cand)
                    break
            if out == target:
                continue
            label = np.float32(0.0)
        dot = np.float32(0.0)
        for d in range(dim):
            dot += hidden[d] * syn1[out, d]
        sig = np.float32(_sigmoid(np.float64(dot)))
        if label > 0.0:
            loss -= _log_sigmoid(np.float64(dot))
        else:
            loss -= _log_sigmoid(-np.float64(dot))
        g = (label - sig) * lr
        for d in range(dim):
            grad[d] += g * syn1[out, d]
        for d in range(dim):
            syn1[out, d] += g * hidden[d]

    ginv = np.float32(1.0) / np.float32(n_parts)
    for q in range(n_parts):
        p = parts[q]
        if p < V:
            for d in range(dim):
                syn0[p, d] += grad[d] * ginv
        else:
            row = p - V
            for d in range(dim):
                syn_ng[row, d] += grad[d] * ginv
    return rng_state, loss, np.int64(1)


@njit(nogil=True, cache=True)
def glove_epoch(order, lo, hi, rows, cols, logx, fweight,
                w, wt, b, bt, gw, gwt, gb, gbt, lr, eps):
    """AdaGrad pass over co-occurrence entries ``order[lo:hi]``.

    Gradients of ``f(x) * (w_i.wt_j + b_i + bt_j - ln x)^2`` are accumulated
    into the per-parameter squared sums first, then applied, so the first
    step is bounded by the learning rate. Returns the summed weighted loss.
    """
    dim = w.shape[1]
    loss = 0.0
    for idx in range(lo, hi):
        e = order[idx]
        i = rows[e]
        j = cols[e]
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
            w[i, d] -= lr * gi / math.sqrt(gw[i, d] + eps)
            wt[j, d] -= lr * gj / math.sqrt(gwt[j, d] + eps)
        gb[i] += coef * coef
        gbt[j] += coef * coef
        b[i] -= lr * coef / math.sqrt(gb[i] + eps)
        bt[j] -= lr * coef / math.sqrt(gbt[j] + eps)
    return loss
