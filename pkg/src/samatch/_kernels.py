"""Compiled inner loops: annealing chains, uphill-move sampling, and bulk
permutation statistics.

The random stream is splitmix64, identical bit-for-bit to
``samatch.rng.SplitMix64`` (tested against it).  Bounded draws use masked
rejection, so every integer draw is exactly uniform.

Objective bookkeeping for the structural objective: rowmis[k] holds the
number of positions l with A[k,l] != B[p[k],p[l]]; the total mismatch
count M is half the sum (both diagonals are zero, so the diagonal never
contributes).  A proposed move changing positions S costs O(|S| n) to
score; accepted moves cost O(|S| n) to commit.  For the default swap
operator |S| = 2.
"""

from __future__ import annotations

import math

import numpy as np
from numba import int64, njit, uint64

OP_SWAP = 0
OP_INSERTION = 1
OP_INVERSION = 2
OP_SCRAMBLE = 3

OBJ_STRUCTURAL = 0
OBJ_ORACLE = 1

_U01 = 1.0 / 9007199254740992.0  # 2^-53


@njit(cache=True, nogil=True, inline="always")
def _next(s):
    # splitmix64: increment by the golden gamma, then avalanche
    s = s + uint64(0x9E3779B97F4A7C15)
    z = s
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    z = z ^ (z >> uint64(31))
    return s, z


@njit(cache=True, nogil=True, inline="always")
def _randbelow(s, n):
    # uniform in [0, n) by masked rejection; no float involved
    nm1 = uint64(n - 1)
    mask = nm1
    mask |= mask >> uint64(1)
    mask |= mask >> uint64(2)
    mask |= mask >> uint64(4)
    mask |= mask >> uint64(8)
    mask |= mask >> uint64(16)
    mask |= mask >> uint64(32)
    while True:
        s, z = _next(s)
        r = z & mask
        if r <= nm1:
            return s, int64(r)


@njit(cache=True, nogil=True, inline="always")
def _u01(s):
    s, z = _next(s)
    return s, (z >> uint64(11)) * _U01


@njit(cache=True, nogil=True)
def _shuffle(s, p):
    # Fisher-Yates, high index downward
    for i in range(p.shape[0] - 1, 0, -1):
        s, j = _randbelow(s, i + 1)
        tmp = p[i]
        p[i] = p[j]
        p[j] = tmp
    return s


@njit(cache=True, nogil=True, inline="always")
def _fill_identity(p):
    for i in range(p.shape[0]):
        p[i] = i


@njit(cache=True, nogil=True, inline="always")
def _draw_pair(s, n):
    # two distinct uniform positions, in draw order
    s, i = _randbelow(s, n)
    s, j = _randbelow(s, n - 1)
    if j >= i:
        j += 1
    return s, i, j


@njit(cache=True, nogil=True)
def _row_mismatch(a, b, p, k, v):
    # mismatches of row k when vertex k is mapped to v, under mapping p
    brow = b[v]
    arow = a[k]
    c = int64(0)
    for l in range(p.shape[0]):
        if arow[l] != brow[p[l]]:
            c += 1
    return c


@njit(cache=True, nogil=True)
def _swap_new_rows(a, b, p, i, j, old_i, old_j):
    """Score swapping positions i and j: returns (delta, new_i, new_j).

    new_i/new_j are the post-swap row mismatch counts; the (i,j) pair term
    itself is unchanged because b is symmetric, so delta is just the sum
    of the two row differences.
    """
    n = p.shape[0]
    vi = p[i]
    vj = p[j]
    arow_i = a[i]
    arow_j = a[j]
    brow_i = b[vj]  # row i will be mapped to vj
    brow_j = b[vi]
    si = int64(0)
    sj = int64(0)
    for l in range(n):
        pl = p[l]
        if arow_i[l] != brow_i[pl]:
            si += 1
        if arow_j[l] != brow_j[pl]:
            sj += 1
    # the scans above used p; correct the l = i and l = j entries for the
    # swapped mapping (position i holds vj, position j holds vi)
    bvv = brow_j[vj]  # b[vi, vj]
    aij = arow_i[j]
    cross = int64(1) if aij != bvv else int64(0)
    fix = cross - int64(bvv) - int64(aij)
    new_i = si + fix
    new_j = sj + fix
    return (new_i - old_i) + (new_j - old_j), new_i, new_j


@njit(cache=True, nogil=True)
def _propose_span(s, p, p_new, op, n):
    """Draw and apply a span move (insertion/inversion/scramble) into p_new.

    Returns (s, a, b): the inclusive 0-based span where p_new may differ
    from p.  p_new is a full copy of p outside the span.
    """
    for l in range(n):
        p_new[l] = p[l]
    if op == OP_INSERTION:
        s, src = _randbelow(s, n)
        s, dst = _randbelow(s, n - 1)
        if dst >= src:
            dst += 1
        val = p[src]
        if dst > src:
            for l in range(src, dst):
                p_new[l] = p[l + 1]
            a, b = src, dst
        else:
            for l in range(src, dst, -1):
                p_new[l] = p[l - 1]
            a, b = dst, src
        p_new[dst] = val
    else:
        s, a = _randbelow(s, n)
        s, b = _randbelow(s, n - 1)
        if b >= a:
            b += 1
        if a > b:
            a, b = b, a
        if op == OP_INVERSION:
            for t in range(a, b + 1):
                p_new[t] = p[b - (t - a)]
        else:  # OP_SCRAMBLE: Fisher-Yates within the span
            for t in range(b, a, -1):
                s, r = _randbelow(s, t - a + 1)
                r += a
                tmp = p_new[t]
                p_new[t] = p_new[r]
                p_new[r] = tmp
    return s, a, b


@njit(cache=True, nogil=True)
def _span_rows(a, b, p, p_new, lo, hi, new_rm):
    """Score rows lo..hi under p_new.

    Fills new_rm[lo..hi] with the new row mismatch counts and returns
    (sum_new, w_new, w_old) where the w terms count mismatched pairs with
    BOTH endpoints inside the span (they are double-counted in row sums).
    """
    n = p.shape[0]
    sum_new = int64(0)
    w_new = int64(0)
    w_old = int64(0)
    for k in range(lo, hi + 1):
        arow = a[k]
        brow_new = b[p_new[k]]
        c = int64(0)
        for l in range(n):
            if arow[l] != brow_new[p_new[l]]:
                c += 1
        new_rm[k] = c
        sum_new += c
        brow_old = b[p[k]]
        for l in range(k + 1, hi + 1):
            akl = arow[l]
            if akl != brow_new[p_new[l]]:
                w_new += 1
            if akl != brow_old[p[l]]:
                w_old += 1
    return sum_new, w_new, w_old


@njit(cache=True, nogil=True)
def anneal_structural(a, b, op, steps, epoch_length, t0, cool, seed):
    """Metropolis chain on the structural objective.

    Returns (best_p, best_val, final_val, accepted, improved,
    trace_step, trace_temp, trace_cur, trace_best); the trace has one
    entry for the initial state plus one per completed epoch.
    """
    n = a.shape[0]
    s = uint64(seed)
    p = np.empty(n, np.int32)
    _fill_identity(p)
    s = _shuffle(s, p)

    rowmis = np.empty(n, np.int64)
    m = int64(0)
    for k in range(n):
        c = _row_mismatch(a, b, p, k, p[k])
        rowmis[k] = c
        m += c
    m //= 2

    best = m
    best_p = p.copy()
    accepted = int64(0)
    improved = int64(0)

    n_epochs = steps // epoch_length
    trace_step = np.zeros(n_epochs + 1, np.int64)
    trace_temp = np.zeros(n_epochs + 1, np.float64)
    trace_cur = np.zeros(n_epochs + 1, np.float64)
    trace_best = np.zeros(n_epochs + 1, np.float64)
    trace_temp[0] = t0
    trace_cur[0] = float(m)
    trace_best[0] = float(best)
    ti = 1

    p_new = np.empty(n, np.int32)
    new_rm = np.empty(n, np.int64)
    temp = t0

    for step in range(steps):
        if op == OP_SWAP:
            s, i, j = _draw_pair(s, n)
            delta, new_i, new_j = _swap_new_rows(a, b, p, i, j, rowmis[i], rowmis[j])
        else:
            s, lo, hi = _propose_span(s, p, p_new, op, n)
            sum_old = int64(0)
            for k in range(lo, hi + 1):
                sum_old += rowmis[k]
            sum_new, w_new, w_old = _span_rows(a, b, p, p_new, lo, hi, new_rm)
            delta = (sum_new - sum_old) - (w_new - w_old)

        take = False
        if delta <= 0:
            take = True
        elif temp > 0.0:
            s, u = _u01(s)
            if u < math.exp(-float(delta) / temp):
                take = True

        if take:
            accepted += 1
            if delta < 0:
                improved += 1
            if op == OP_SWAP:
                vi = p[i]
                vj = p[j]
                for k in range(n):
                    if k != i and k != j:
                        brow = b[p[k]]
                        aki = a[k, i]
                        akj = a[k, j]
                        d = int64(0)
                        if aki != brow[vj]:
                            d += 1
                        if akj != brow[vi]:
                            d += 1
                        if aki != brow[vi]:
                            d -= 1
                        if akj != brow[vj]:
                            d -= 1
                        rowmis[k] += d
                rowmis[i] = new_i
                rowmis[j] = new_j
                p[i] = vj
                p[j] = vi
            else:
                for k in range(n):
                    if k < lo or k > hi:
                        brow = b[p[k]]
                        d = int64(0)
                        for l in range(lo, hi + 1):
                            akl = a[k, l]
                            if akl != brow[p_new[l]]:
                                d += 1
                            if akl != brow[p[l]]:
                                d -= 1
                        rowmis[k] += d
                for k in range(lo, hi + 1):
                    rowmis[k] = new_rm[k]
                    p[k] = p_new[k]
            m += delta
            if m < best:
                best = m
                best_p[:] = p

        if (step + 1) % epoch_length == 0:
            trace_step[ti] = step + 1
            trace_temp[ti] = temp
            trace_cur[ti] = float(m)
            trace_best[ti] = float(best)
            ti += 1
            temp *= cool

    return best_p, best, m, accepted, improved, trace_step, trace_temp, trace_cur, trace_best


@njit(cache=True, nogil=True)
def anneal_oracle(gt, op, steps, epoch_length, t0, cool, seed):
    """Metropolis chain on the oracle objective (misplaced count / n).

    Same return layout as anneal_structural; integer values count
    misplaced vertices, traces record the normalized objective.
    """
    n = gt.shape[0]
    s = uint64(seed)
    p = np.empty(n, np.int32)
    _fill_identity(p)
    s = _shuffle(s, p)

    mis = int64(0)
    for k in range(n):
        if p[k] != gt[k]:
            mis += 1

    best = mis
    best_p = p.copy()
    accepted = int64(0)
    improved = int64(0)
    inv_n = 1.0 / n

    n_epochs = steps // epoch_length
    trace_step = np.zeros(n_epochs + 1, np.int64)
    trace_temp = np.zeros(n_epochs + 1, np.float64)
    trace_cur = np.zeros(n_epochs + 1, np.float64)
    trace_best = np.zeros(n_epochs + 1, np.float64)
    trace_temp[0] = t0
    trace_cur[0] = mis * inv_n
    trace_best[0] = best * inv_n
    ti = 1

    p_new = np.empty(n, np.int32)
    temp = t0

    for step in range(steps):
        if op == OP_SWAP:
            s, i, j = _draw_pair(s, n)
            vi = p[i]
            vj = p[j]
            delta = int64(0)
            if vj != gt[i]:
                delta += 1
            if vi != gt[j]:
                delta += 1
            if vi != gt[i]:
                delta -= 1
            if vj != gt[j]:
                delta -= 1
        else:
            s, lo, hi = _propose_span(s, p, p_new, op, n)
            delta = int64(0)
            for k in range(lo, hi + 1):
                if p_new[k] != gt[k]:
                    delta += 1
                if p[k] != gt[k]:
                    delta -= 1

        take = False
        if delta <= 0:
            take = True
        elif temp > 0.0:
            s, u = _u01(s)
            if u < math.exp(-(delta * inv_n) / temp):
                take = True

        if take:
            accepted += 1
            if delta < 0:
                improved += 1
            if op == OP_SWAP:
                p[i] = vj
                p[j] = vi
            else:
                for k in range(lo, hi + 1):
                    p[k] = p_new[k]
            mis += delta
            if mis < best:
                best = mis
                best_p[:] = p

        if (step + 1) % epoch_length == 0:
            trace_step[ti] = step + 1
            trace_temp[ti] = temp
            trace_cur[ti] = mis * inv_n
            trace_best[ti] = best * inv_n
            ti += 1
            temp *= cool

    return best_p, best, mis, accepted, improved, trace_step, trace_temp, trace_cur, trace_best


@njit(cache=True, nogil=True)
def sample_uphill_structural(a, b, op, samples, seed):
    """Deltas of random moves from fresh random states; positive ones only.

    Emits raw mismatch-count deltas, the same units the structural chain
    feeds to the Metropolis rule.
    """
    n = a.shape[0]
    s = uint64(seed)
    out = np.empty(samples, np.float64)
    cnt = 0
    p = np.empty(n, np.int32)
    p_new = np.empty(n, np.int32)
    new_rm = np.empty(n, np.int64)
    for _ in range(samples):
        _fill_identity(p)
        s = _shuffle(s, p)
        if op == OP_SWAP:
            s, i, j = _draw_pair(s, n)
            old_i = _row_mismatch(a, b, p, i, p[i])
            old_j = _row_mismatch(a, b, p, j, p[j])
            delta, _, _ = _swap_new_rows(a, b, p, i, j, old_i, old_j)
        else:
            s, lo, hi = _propose_span(s, p, p_new, op, n)
            sum_old = int64(0)
            for k in range(lo, hi + 1):
                sum_old += _row_mismatch(a, b, p, k, p[k])
            sum_new, w_new, w_old = _span_rows(a, b, p, p_new, lo, hi, new_rm)
            delta = (sum_new - sum_old) - (w_new - w_old)
        if delta > 0:
            out[cnt] = float(delta)
            cnt += 1
    return out[:cnt]


@njit(cache=True, nogil=True)
def sample_uphill_oracle(gt, op, samples, seed):
    """Like sample_uphill_structural, in normalized (misplaced/n) units."""
    n = gt.shape[0]
    s = uint64(seed)
    out = np.empty(samples, np.float64)
    cnt = 0
    p = np.empty(n, np.int32)
    p_new = np.empty(n, np.int32)
    inv_n = 1.0 / n
    for _ in range(samples):
        _fill_identity(p)
        s = _shuffle(s, p)
        if op == OP_SWAP:
            s, i, j = _draw_pair(s, n)
            vi = p[i]
            vj = p[j]
            delta = int64(0)
            if vj != gt[i]:
                delta += 1
            if vi != gt[j]:
                delta += 1
            if vi != gt[i]:
                delta -= 1
            if vj != gt[j]:
                delta -= 1
        else:
            s, lo, hi = _propose_span(s, p, p_new, op, n)
            delta = int64(0)
            for k in range(lo, hi + 1):
                if p_new[k] != gt[k]:
                    delta += 1
                if p[k] != gt[k]:
                    delta -= 1
        if delta > 0:
            out[cnt] = delta * inv_n
            cnt += 1
    return out[:cnt]


@njit(cache=True, nogil=True)
def count_fixed_over(n, samples, threshold, seed):
    """Of `samples` uniform permutations of n elements, how many have
    strictly more than `threshold` fixed points."""
    s = uint64(seed)
    p = np.empty(n, np.int32)
    count = int64(0)
    for _ in range(samples):
        _fill_identity(p)
        s = _shuffle(s, p)
        fp = int64(0)
        for i in range(n):
            if p[i] == i:
                fp += 1
        if fp > threshold:
            count += 1
    return count


@njit(cache=True, nogil=True)
def fixed_point_histogram(n, samples, seed):
    """Histogram over fixed-point counts of `samples` uniform permutations."""
    s = uint64(seed)
    p = np.empty(n, np.int32)
    hist = np.zeros(n + 1, np.int64)
    for _ in range(samples):
        _fill_identity(p)
        s = _shuffle(s, p)
        fp = int64(0)
        for i in range(n):
            if p[i] == i:
                fp += 1
        hist[fp] += 1
    return hist


# --- test hooks: expose the raw streams for equivalence checks ---------------


@njit(cache=True)
def rng_uint64_stream(seed, count):
    s = uint64(seed)
    out = np.empty(count, np.uint64)
    for i in range(count):
        s, z = _next(s)
        out[i] = z
    return out


@njit(cache=True)
def rng_randbelow_stream(seed, bound, count):
    s = uint64(seed)
    out = np.empty(count, np.int64)
    for i in range(count):
        s, v = _randbelow(s, bound)
        out[i] = v
    return out


@njit(cache=True)
def rng_u01_stream(seed, count):
    s = uint64(seed)
    out = np.empty(count, np.float64)
    for i in range(count):
        s, u = _u01(s)
        out[i] = u
    return out


@njit(cache=True)
def rng_permutation(seed, n):
    s = uint64(seed)
    p = np.empty(n, np.int32)
    _fill_identity(p)
    _shuffle(s, p)
    return p
