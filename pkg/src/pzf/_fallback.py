"""Pure Python/numpy versions of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable (or when
``PZF_BACKEND=python``).  Outputs match the compiled kernels exactly.
"""
from __future__ import annotations

import numpy as np

from ._random import chain_bits, force_threshold, round_key

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_M1 = _U64(0xBF58476D1CE4E5B9)
_M2 = _U64(0x94D049BB133111EB)

# 16ths: window vertex with 0, 1 or 2 blue neighbours turns blue w.p. 0, 12/16, 15/16
WINDOW_NUM = (0, 12, 15)


def _splitmix(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> _U64(30))) * _M1
    z = (z ^ (z >> _U64(27))) * _M2
    return z ^ (z >> _U64(31))


def edge_bits_array(seed: int, t: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    h = _U64(round_key(seed, t))
    a = _splitmix(h ^ u.astype(_U64))
    return _splitmix(a ^ v.astype(_U64))


def pzf_step(indptr: np.ndarray, indices: np.ndarray, blue: np.ndarray, seed: int, t: int) -> np.ndarray:
    n = blue.size
    deg = np.diff(indptr)
    src = np.repeat(np.arange(n, dtype=np.int64), deg)
    blue_b = blue.astype(bool)
    closed = blue.astype(np.int64) + np.bincount(src, weights=blue[indices], minlength=n).astype(np.int64)
    cand = blue_b[src] & ~blue_b[indices]
    out = blue.copy()
    if not cand.any():
        return out
    u = src[cand]
    v = indices[cand].astype(np.int64)
    ku, du = closed[u], deg[u]
    sure = ku >= du
    fire = sure.copy()
    risky = ~sure
    if risky.any():
        ur, vr, kr, dr = u[risky], v[risky], ku[risky], du[risky]
        base = int(dr.max()) + 1
        uniq, inv = np.unique(kr * base + dr, return_inverse=True)
        thr_u = np.array([force_threshold(int(k), int(d)) for k, d in zip(*divmod(uniq, base))],
                         dtype=_U64)
        bits = edge_bits_array(seed, t, ur, vr)
        fire[risky] = bits < thr_u[inv]
    out[v[fire]] = 1
    return out


def pzf_run(indptr: np.ndarray, indices: np.ndarray, blue: np.ndarray, seed: int,
            max_rounds: int) -> tuple[list[int], bool]:
    n = blue.size
    cur = np.ascontiguousarray(blue, dtype=np.uint8)
    counts = [int(cur.sum())]
    t = 0
    while counts[-1] < n and t < max_rounds:
        cur = pzf_step(indptr, indices, cur, seed, t)
        counts.append(int(cur.sum()))
        t += 1
    return counts, counts[-1] == n


def _window_probs(d: int, c: int) -> list[float]:
    probs = []
    for i in range(d + 1):
        left = (c >> (i - 1)) & 1 if i >= 1 else 0
        below = (c >> i) & 1 if i < d else 0
        probs.append(WINDOW_NUM[left + below] / 16.0)
    return probs


def window_matrix_float(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR ``(indptr, indices, data)`` of the d-window chain (non-reset rows enumerated)."""
    size = 1 << d
    full = size - 1
    indptr = np.zeros(size + 1, dtype=np.int64)
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    for c in range(size):
        if c == 0:
            col, val = reset_row(d)
            col = np.array(col, dtype=np.int64)
            val = np.array(val, dtype=np.float64)
        else:
            p = _window_probs(d, c)
            masks = np.zeros(1, dtype=np.int64)
            pr = np.ones(1)
            for i in range(1, d):
                if p[i] > 0.0:
                    masks = np.concatenate([masks, masks | (1 << i)])
                    pr = np.concatenate([pr * (1.0 - p[i]), pr * p[i]])
            p0, pd = p[0], p[d]
            # masks hold W_1..W_{d-1} at bits 1..d-1; X = W_0..W_{d-1}, Y = W_1..W_d
            dest = np.concatenate([masks | 1, masks, (masks >> 1) | (1 << (d - 1)), masks >> 1])
            w = np.concatenate([
                pr * (p0 * (1.0 - pd) + 0.5 * p0 * pd),
                pr * (0.5 * (1.0 - p0) * (1.0 - pd)),
                pr * (pd * (1.0 - p0) + 0.5 * p0 * pd),
                pr * (0.5 * (1.0 - p0) * (1.0 - pd)),
            ])
            keep = w > 0.0
            col, inv = np.unique(dest[keep] & full, return_inverse=True)
            val = np.bincount(inv, weights=w[keep])
        cols.append(col)
        vals.append(val)
        indptr[c + 1] = indptr[c] + col.size
    return indptr, np.concatenate(cols).astype(np.int32), np.concatenate(vals)


def reset_row(d: int) -> tuple[list[int], list[float]]:
    """Destinations and weights of the all-white row (as floats)."""
    if d == 2:
        return [3], [1.0]
    if d % 2:
        return [0b111 << ((d - 3) // 2)], [1.0]
    return sorted([0b111 << ((d - 4) // 2), 0b111 << ((d - 2) // 2)]), [0.5, 0.5]


def chain_sample(d: int, steps: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Simulate the window chain from all-blue; return per-step states and discrepancies."""
    full = (1 << d) - 1
    states = np.empty(steps + 1, dtype=np.int32)
    discs = np.empty(steps + 1, dtype=np.int64)
    state, disc = full, 0
    prev, prev_disc = full, 0
    states[0], discs[0] = state, disc
    for j in range(steps):
        if state:
            word = 0
            for i in range(d + 1):
                left = (state >> (i - 1)) & 1 if i >= 1 else 0
                below = (state >> i) & 1 if i < d else 0
                num = WINDOW_NUM[left + below]
                if num and (chain_bits(seed, j, i) >> 60) < num:
                    word |= 1 << i
            w0, wd = word & 1, (word >> d) & 1
            if w0 == wd:
                pick_x = (chain_bits(seed, j, d + 1) >> 63) == 0
            else:
                pick_x = w0 > wd
            prev, prev_disc = state, disc
            if pick_x:
                state, disc = word & full, disc - 1
            else:
                state, disc = word >> 1, disc + 1
        else:
            blues = [i for i in range(d) if (prev >> i) & 1]
            k = blues[(chain_bits(seed, j, d + 2) * len(blues)) >> 64]
            disc = prev_disc + 2 * k - (d - 1)
            if d % 2:
                state = 0b111 << ((d - 3) // 2)
            else:
                if (chain_bits(seed, j, d + 3) >> 63) == 0:
                    start, disc = (d - 4) // 2, disc + 1
                else:
                    start, disc = (d - 2) // 2, disc - 1
                state = ((0b111 << (start + 1)) >> 1) & full
        states[j + 1], discs[j + 1] = state, disc
    return states, discs

