"""Stationary distributions: exact (fraction-free elimination) and floating point."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components


class ChainError(ValueError):
    """Chain is reducible or periodic, or the iteration did not converge."""


def bareiss_solve(a: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction]:
    """Solve ``a x = b`` over the rationals for a nonsingular integer matrix.

    Fraction-free Gaussian elimination keeps every intermediate an integer
    (each is a minor of the augmented matrix), then one rational back
    substitution recovers ``x``.
    """
    n = len(a)
    m = [list(map(int, row)) + [int(bi)] for row, bi in zip(a, b)]
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    break
            else:
                raise ChainError("singular system")
        rowk = m[k]
        pk = rowk[k]
        tail = range(k + 1, n + 1)
        for i in range(k + 1, n):
            ri = m[i]
            f = ri[k]
            if f == 0:
                new = [ri[j] * pk // prev for j in tail]
            else:
                new = [(ri[j] * pk - f * rowk[j]) // prev for j in tail]
            ri[k] = 0
            ri[k + 1:] = new
        prev = pk
    if m[n - 1][n - 1] == 0:
        raise ChainError("singular system")
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        row = m[i]
        s = Fraction(row[n])
        for j in range(i + 1, n):
            if row[j]:
                s -= row[j] * x[j]
        x[i] = s / row[i]
    return x


def stationary_exact(rows: Sequence[dict[int, Fraction]]) -> list[Fraction]:
    """Stationary vector of a rational row-stochastic matrix given as sparse rows."""
    n = len(rows)
    den = 1
    for row in rows:
        for p in row.values():
            den = den * p.denominator // gcd(den, p.denominator)
    # columns of (P - I)^T scaled to integers; last equation replaced by sum(pi) = 1
    a = [[0] * n for _ in range(n)]
    for i, row in enumerate(rows):
        for j, p in row.items():
            a[j][i] += int(p * den)
        a[i][i] -= den
    a[n - 1] = [1] * n
    b = [0] * (n - 1) + [1]
    return bareiss_solve(a, b)


def gth(p: np.ndarray) -> np.ndarray:
    """Grassmann-Taksar-Heyman elimination for a dense row-stochastic matrix.

    Subtraction-free, so small stationary entries keep full relative accuracy.
    """
    a = np.array(p, dtype=np.float64, copy=True)
    n = a.shape[0]
    for k in range(n - 1, 0, -1):
        s = a[k, :k].sum()
        if s <= 0.0:
            raise ChainError("reducible chain: state cannot leave its lower block")
        a[:k, k] /= s
        a[:k, :k] += np.outer(a[:k, k], a[k, :k])
    pi = np.zeros(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ a[:k, k]
    return pi / pi.sum()


def power_iteration(p: sp.csr_matrix, tol: float = 1e-13, max_iter: int = 100_000,
                    watch: int = 0, x0: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Iterate ``x <- x P`` until the sup-norm change drops below ``tol``.

    The entry ``watch`` must also settle to relative change ``tol``; entries of
    the stationary vector can be many orders below the sup norm.
    """
    n = p.shape[0]
    pt = p.T.tocsr()
    x = np.full(n, 1.0 / n) if x0 is None else np.asarray(x0, dtype=np.float64)
    for it in range(1, max_iter + 1):
        y = pt @ x
        y /= y.sum()
        diff = np.abs(y - x).max()
        rel = abs(y[watch] - x[watch]) / max(y[watch], np.finfo(float).tiny)
        x = y
        if diff < tol and rel < tol:
            return x, it
    raise ChainError(f"power iteration did not converge in {max_iter} iterations")


def check_ergodic(indptr: np.ndarray, indices: np.ndarray, n: int) -> int:
    """Verify irreducibility and aperiodicity of a transition pattern; return the period (1)."""
    pattern = sp.csr_matrix((np.ones(len(indices), dtype=np.int8), indices, indptr), shape=(n, n))
    ncomp, _ = connected_components(pattern, directed=True, connection="strong")
    if ncomp != 1:
        raise ChainError(f"chain is reducible ({ncomp} communicating classes)")
    order, pred = breadth_first_order(pattern, 0, directed=True, return_predecessors=True)
    level = np.full(n, -1, dtype=np.int64)
    level[0] = 0
    for v in order[1:]:
        level[v] = level[pred[v]] + 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    period = 0
    for delta in np.unique(np.abs(level[rows] + 1 - level[indices])):
        period = gcd(period, int(delta))
        if period == 1:
            break
    if period != 1:
        raise ChainError(f"chain is periodic with period {period}")
    return period
