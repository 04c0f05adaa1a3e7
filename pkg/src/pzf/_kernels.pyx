# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: pzf rounds, window-chain matrix rows, window-chain sampler.

Bit-for-bit compatible with :mod:`pzf._fallback`.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t
from libc.stdlib cimport malloc, free
from libc.string cimport memset

cnp.import_array()

cdef extern from *:
    """
    typedef unsigned __int128 pzf_u128;
    static inline unsigned long long pzf_threshold(unsigned long long k, unsigned long long deg) {
        return (unsigned long long)((((pzf_u128)k << 64) + deg - 1) / deg);
    }
    static inline unsigned long long pzf_mulhi(unsigned long long a, unsigned long long b) {
        return (unsigned long long)(((pzf_u128)a * b) >> 64);
    }
    """
    uint64_t pzf_threshold(uint64_t k, uint64_t deg) nogil
    uint64_t pzf_mulhi(uint64_t a, uint64_t b) nogil

DEF CHAIN_TAG = 0x57494E444F57


cdef inline uint64_t splitmix(uint64_t x) noexcept nogil:
    cdef uint64_t z = x + <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t round_key(uint64_t seed, uint64_t t) noexcept nogil:
    return splitmix(splitmix(seed) ^ t)


cdef inline uint64_t chain_bits(uint64_t seed, uint64_t step, uint64_t slot) noexcept nogil:
    return splitmix(splitmix(round_key(seed, step) ^ slot) ^ <uint64_t>CHAIN_TAG)


cdef void _step(const int64_t[::1] indptr, const int32_t[::1] indices, const uint8_t[::1] blue,
                uint8_t[::1] out, uint64_t seed, uint64_t t) noexcept nogil:
    cdef Py_ssize_t n = blue.shape[0]
    cdef Py_ssize_t u, e
    cdef int64_t k, deg
    cdef int32_t v
    cdef uint64_t h, thr
    cdef uint64_t rk = round_key(seed, t)
    for u in range(n):
        out[u] = blue[u]
    for u in range(n):
        if not blue[u]:
            continue
        deg = indptr[u + 1] - indptr[u]
        k = 1
        for e in range(indptr[u], indptr[u + 1]):
            k += blue[indices[e]]
        if k > deg:
            continue
        if k >= deg:
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if not blue[v]:
                    out[v] = 1
            continue
        thr = pzf_threshold(<uint64_t>k, <uint64_t>deg)
        h = splitmix(rk ^ <uint64_t>u)
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if not blue[v] and splitmix(h ^ <uint64_t>v) < thr:
                out[v] = 1


def pzf_step(indptr, indices, blue, seed, t):
    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef const uint8_t[::1] b = np.ascontiguousarray(blue, dtype=np.uint8)
    out = np.empty(b.shape[0], dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t tt = <uint64_t>int(t)
    with nogil:
        _step(ip, ix, b, o, s, tt)
    return out


def pzf_run(indptr, indices, blue, seed, max_rounds):
    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cur_arr = np.array(blue, dtype=np.uint8, copy=True)
    nxt_arr = np.empty_like(cur_arr)
    cdef uint8_t[::1] cur = cur_arr
    cdef uint8_t[::1] nxt = nxt_arr
    cdef uint8_t[::1] tmp
    cdef Py_ssize_t n = cur.shape[0], i
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t limit = max_rounds, t = 0, count = 0
    for i in range(n):
        count += cur[i]
    counts = [count]
    while count < n and t < limit:
        with nogil:
            _step(ip, ix, cur, nxt, s, <uint64_t>t)
            count = 0
            for i in range(n):
                count += nxt[i]
        tmp = cur
        cur = nxt
        nxt = tmp
        counts.append(count)
        t += 1
    return counts, count == n


cdef inline int window_num(int c, int i, int d) noexcept nogil:
    cdef int left = (c >> (i - 1)) & 1 if i >= 1 else 0
    cdef int below = (c >> i) & 1 if i < d else 0
    cdef int s = left + below
    return 0 if s == 0 else (12 if s == 1 else 15)


cdef Py_ssize_t _window_row(int d, int c, double* acc, int32_t* touched, int64_t* masks,
                            double* pr) noexcept nogil:
    """Accumulate row ``c`` into ``acc``; returns the number of touched columns."""
    cdef int i, j, m = 1, ntouch = 0
    cdef double p, p0, pd, wx1, wx0, wy1, wy0
    cdef int64_t dst, full = (1 << d) - 1
    masks[0] = 0
    pr[0] = 1.0
    for i in range(1, d):
        p = window_num(c, i, d) / 16.0
        if p > 0.0:
            for j in range(m):
                masks[m + j] = masks[j] | (1 << i)
                pr[m + j] = pr[j] * p
                pr[j] = pr[j] * (1.0 - p)
            m *= 2
    p0 = window_num(c, 0, d) / 16.0
    pd = window_num(c, d, d) / 16.0
    wx1 = p0 * (1.0 - pd) + 0.5 * p0 * pd
    wx0 = 0.5 * (1.0 - p0) * (1.0 - pd)
    wy1 = pd * (1.0 - p0) + 0.5 * p0 * pd
    wy0 = wx0
    for j in range(m):
        if wx1 > 0.0:
            dst = (masks[j] | 1) & full
            if acc[dst] == 0.0:
                touched[ntouch] = <int32_t>dst
                ntouch += 1
            acc[dst] += pr[j] * wx1
        if wx0 > 0.0:
            dst = masks[j] & full
            if acc[dst] == 0.0:
                touched[ntouch] = <int32_t>dst
                ntouch += 1
            acc[dst] += pr[j] * wx0
        if wy1 > 0.0:
            dst = (masks[j] >> 1) | (1 << (d - 1))
            if acc[dst] == 0.0:
                touched[ntouch] = <int32_t>dst
                ntouch += 1
            acc[dst] += pr[j] * wy1
        if wy0 > 0.0:
            dst = masks[j] >> 1
            if acc[dst] == 0.0:
                touched[ntouch] = <int32_t>dst
                ntouch += 1
            acc[dst] += pr[j] * wy0
    return ntouch


def window_matrix_float(int d):
    """CSR ``(indptr, indices, data)`` of the d-window chain in double precision."""
    from ._fallback import reset_row
    cdef int64_t size = 1 << d
    cdef int c
    cdef Py_ssize_t k, nt
    cdef double* acc = <double*>malloc(size * sizeof(double))
    cdef int32_t* touched = <int32_t*>malloc(size * sizeof(int32_t))
    cdef int64_t* masks = <int64_t*>malloc(size * sizeof(int64_t))
    cdef double* pr = <double*>malloc(size * sizeof(double))
    indptr_arr = np.zeros(size + 1, dtype=np.int64)
    cdef int64_t[::1] indptr = indptr_arr
    try:
        memset(acc, 0, size * sizeof(double))
        # pass 1: row lengths
        with nogil:
            for c in range(1, size):
                nt = _window_row(d, c, acc, touched, masks, pr)
                for k in range(nt):
                    acc[touched[k]] = 0.0
                indptr[c + 1] = nt
        reset_cols, reset_vals = reset_row(d)
        indptr[1] = len(reset_cols)
        np.cumsum(indptr_arr, out=indptr_arr)
        indices_arr = np.empty(indptr[size], dtype=np.int32)
        data_arr = np.empty(indptr[size], dtype=np.float64)
        cols_v = indices_arr
        vals_v = data_arr
        for k in range(len(reset_cols)):
            indices_arr[k] = reset_cols[k]
            data_arr[k] = reset_vals[k]
        _fill(d, size, acc, touched, masks, pr, indptr, cols_v, vals_v)
    finally:
        free(acc)
        free(touched)
        free(masks)
        free(pr)
    return indptr_arr, indices_arr, data_arr


cdef void _fill(int d, int64_t size, double* acc, int32_t* touched, int64_t* masks, double* pr,
                int64_t[::1] indptr, int32_t[::1] cols, double[::1] vals) noexcept nogil:
    cdef int c
    cdef int64_t col
    cdef Py_ssize_t pos
    for c in range(1, size):
        _window_row(d, c, acc, touched, masks, pr)
        # scanning the accumulator keeps columns ordered within the row
        pos = indptr[c]
        for col in range(size):
            if acc[col] != 0.0:
                cols[pos] = <int32_t>col
                vals[pos] = acc[col]
                acc[col] = 0.0
                pos += 1


def chain_sample(int d, int64_t steps, seed):
    """Simulate the window chain from all-blue; return per-step states and discrepancies."""
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    states_arr = np.empty(steps + 1, dtype=np.int32)
    discs_arr = np.empty(steps + 1, dtype=np.int64)
    cdef int32_t[::1] states = states_arr
    cdef int64_t[::1] discs = discs_arr
    cdef int full = (1 << d) - 1
    cdef int state = full, prev = full, word, i, num, w0, wd, pick_x, nblue, k, start, idx
    cdef int64_t disc = 0, prev_disc = 0, j
    states[0] = state
    discs[0] = 0
    with nogil:
        for j in range(steps):
            if state != 0:
                word = 0
                for i in range(d + 1):
                    num = window_num(state, i, d)
                    if num != 0 and (chain_bits(s, <uint64_t>j, <uint64_t>i) >> 60) < <uint64_t>num:
                        word |= 1 << i
                w0 = word & 1
                wd = (word >> d) & 1
                if w0 == wd:
                    pick_x = (chain_bits(s, <uint64_t>j, <uint64_t>(d + 1)) >> 63) == 0
                else:
                    pick_x = w0 > wd
                prev = state
                prev_disc = disc
                if pick_x:
                    state = word & full
                    disc -= 1
                else:
                    state = word >> 1
                    disc += 1
            else:
                nblue = 0
                for i in range(d):
                    nblue += (prev >> i) & 1
                idx = <int>pzf_mulhi(chain_bits(s, <uint64_t>j, <uint64_t>(d + 2)), <uint64_t>nblue)
                k = -1
                for i in range(d):
                    if (prev >> i) & 1:
                        if idx == 0:
                            k = i
                            break
                        idx -= 1
                disc = prev_disc + 2 * k - (d - 1)
                if d % 2 == 1:
                    state = 7 << ((d - 3) // 2)
                else:
                    if (chain_bits(s, <uint64_t>j, <uint64_t>(d + 3)) >> 63) == 0:
                        start = (d - 4) // 2
                        disc += 1
                    else:
                        start = (d - 2) // 2
                        disc -= 1
                    state = ((7 << (start + 1)) >> 1) & full
            states[j + 1] = state
            discs[j + 1] = disc
    return states_arr, discs_arr
