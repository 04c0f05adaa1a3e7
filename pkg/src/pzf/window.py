"""The d-window configuration chain that bounds grid propagation speed.

A d-window is ``d`` consecutive vertices on an anti-diagonal of the grid,
``D = ((a-d+1, b), ..., (a, b-d+1))``; its configuration is a d-bit integer
with bit ``i`` set when position ``i`` is blue.  Each step looks at the next
anti-diagonal ``W_0..W_d`` with ``W_i = (a-d+1+i, b+1-i)``, whose in-window
neighbours are positions ``i-1`` and ``i``.  The two candidate windows
``X = W_0..W_{d-1}`` and ``Y = W_1..W_d`` share ``W_1..W_{d-1}``; the heavier
one is kept, ties split evenly.  An all-white window is replaced by three
consecutive blue vertices centred on a previously blue vertex.
"""
from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from . import linalg
from ._backend import kernels
from ._fallback import WINDOW_NUM

EXACT_MAX_D = 8
FLOAT_MAX_D = 16
DENSE_MAX_D = 10


class WindowRangeError(ValueError):
    """Window length outside the supported range for the requested mode."""


@dataclass(frozen=True)
class WindowConfig:
    d: int
    bits: int

    def __post_init__(self):
        if self.d < 2:
            raise WindowRangeError("window length must be >= 2")
        if not 0 <= self.bits < (1 << self.d):
            raise ValueError(f"bits {self.bits} do not fit a {self.d}-window")

    @classmethod
    def from_tuple(cls, values: Iterable[int]) -> "WindowConfig":
        values = tuple(values)
        return cls(len(values), sum(1 << i for i, x in enumerate(values) if x))

    @classmethod
    def all_blue(cls, d: int) -> "WindowConfig":
        return cls(d, (1 << d) - 1)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.d))

    @property
    def is_white(self) -> bool:
        return self.bits == 0

    def reversed(self) -> "WindowConfig":
        return WindowConfig.from_tuple(self.as_tuple()[::-1])

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.as_tuple())) + ")"


def _as_config(c: WindowConfig | tuple) -> WindowConfig:
    return c if isinstance(c, WindowConfig) else WindowConfig.from_tuple(c)


def frontier_probs(c: WindowConfig | tuple) -> list[Fraction]:
    """Probability that each of ``W_0..W_d`` is blue one round later."""
    c = _as_config(c)
    if c.is_white:
        raise ValueError("all-white windows are handled by the reset rule")
    d, bits = c.d, c.bits
    out = []
    for i in range(d + 1):
        left = (bits >> (i - 1)) & 1 if i >= 1 else 0
        below = (bits >> i) & 1 if i < d else 0
        out.append(Fraction(WINDOW_NUM[left + below], 16))
    return out


def reset_targets(d: int) -> dict[int, Fraction]:
    if d == 2:
        return {0b11: Fraction(1)}
    if d % 2:
        return {0b111 << ((d - 3) // 2): Fraction(1)}
    return {0b111 << ((d - 4) // 2): Fraction(1, 2), 0b111 << ((d - 2) // 2): Fraction(1, 2)}


def _row_exact(d: int, bits: int) -> dict[int, Fraction]:
    if bits == 0:
        return reset_targets(d)
    probs = frontier_probs(WindowConfig(d, bits))
    full = (1 << d) - 1
    # enumerate outcomes of W over the vertices that can turn blue
    outcomes: list[tuple[int, Fraction]] = [(0, Fraction(1))]
    for i, p in enumerate(probs):
        if p == 0:
            continue
        outcomes = [(w, q * (1 - p)) for w, q in outcomes] + [(w | (1 << i), q * p) for w, q in outcomes]
    row: dict[int, Fraction] = {}
    for word, q in outcomes:
        x, y = word & full, word >> 1
        nx, ny = x.bit_count(), y.bit_count()
        if nx > ny:
            row[x] = row.get(x, 0) + q
        elif ny > nx:
            row[y] = row.get(y, 0) + q
        else:
            row[x] = row.get(x, 0) + q / 2
            row[y] = row.get(y, 0) + q / 2
    return row


def transition_row(c: WindowConfig | tuple) -> dict[WindowConfig, Fraction]:
    """Exact transition probabilities out of configuration ``c``."""
    c = _as_config(c)
    return {WindowConfig(c.d, k): v for k, v in sorted(_row_exact(c.d, c.bits).items())}


@dataclass
class TransitionMatrix:
    """Row-stochastic 2^d x 2^d matrix; ``rows`` (exact) or ``csr`` (float) is set."""

    d: int
    mode: str
    rows: list[dict[int, Fraction]] | None = None
    csr: sp.csr_matrix | None = None

    @property
    def size(self) -> int:
        return 1 << self.d

    def entry(self, i: int, j: int) -> Fraction | float:
        if self.rows is not None:
            return self.rows[i].get(j, Fraction(0))
        return float(self.csr[i, j])

    def row_sums(self) -> list:
        if self.rows is not None:
            return [sum(r.values(), Fraction(0)) for r in self.rows]
        return np.asarray(self.csr.sum(axis=1)).ravel().tolist()

    def pattern(self) -> tuple[np.ndarray, np.ndarray]:
        if self.csr is not None:
            return self.csr.indptr, self.csr.indices
        indptr = np.zeros(self.size + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(r) for r in self.rows])
        indices = np.array([j for r in self.rows for j in sorted(r)], dtype=np.int32)
        return indptr, indices

    def dense(self) -> list[list]:
        n = self.size
        if self.rows is not None:
            return [[r.get(j, Fraction(0)) for j in range(n)] for r in self.rows]
        return self.csr.toarray().tolist()

    def to_json(self) -> str:
        """Dense nested lists for d <= 4, sparse ``[row, col, value]`` triplets beyond."""
        fmt = (lambda v: f"{v.numerator}/{v.denominator}") if self.mode == "exact" else (lambda v: float(f"{v:.17g}"))
        doc: dict = {"d": self.d, "mode": self.mode,
                     "states": [str(WindowConfig(self.d, i)) for i in range(self.size)]}
        if self.d <= 4:
            doc["format"] = "dense"
            doc["matrix"] = [[fmt(v) for v in row] for row in self.dense()]
        else:
            doc["format"] = "sparse"
            if self.rows is not None:
                trip = [[i, j, fmt(v)] for i, r in enumerate(self.rows) for j, v in sorted(r.items())]
            else:
                coo = self.csr.tocoo()
                trip = [[int(i), int(j), fmt(v)] for i, j, v in zip(coo.row, coo.col, coo.data)]
            doc["entries"] = trip
        return json.dumps(doc)


def build_matrix(d: int, mode: str = "exact", max_d: int | None = None) -> TransitionMatrix:
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    cap = max_d if max_d is not None else (EXACT_MAX_D if mode == "exact" else FLOAT_MAX_D)
    if not 2 <= d <= cap:
        raise WindowRangeError(f"d={d} outside 2..{cap} for {mode} mode")
    if mode == "exact":
        return TransitionMatrix(d, mode, rows=[_row_exact(d, c) for c in range(1 << d)])
    if d > 14:
        warnings.warn("entries approach double precision for d > 14; treat results with care",
                      RuntimeWarning, stacklevel=2)
    indptr, indices, data = kernels.window_matrix_float(d)
    n = 1 << d
    return TransitionMatrix(d, mode, csr=sp.csr_matrix((data, indices, indptr), shape=(n, n)))


@dataclass
class StationaryDist:
    pi: list
    mu: Fraction | float
    epsilon: Fraction | float
    mode: str
    method: str
    residual: float = 0.0
    iterations: int = 0

    @property
    def d(self) -> int:
        return len(self.pi).bit_length() - 1


def speed_excess(mu):
    """Excess speed factor ``mu / (1 - 2 mu)``."""
    return mu / (1 - 2 * mu)


def stationary(m: TransitionMatrix, tol: float = 1e-13, max_iter: int = 100_000) -> StationaryDist:
    indptr, indices = m.pattern()
    linalg.check_ergodic(indptr, indices, m.size)
    if m.mode == "exact":
        pi = linalg.stationary_exact(m.rows)
        image = [Fraction(0)] * m.size
        for i, row in enumerate(m.rows):
            for j, p in row.items():
                image[j] += pi[i] * p
        if image != pi or sum(pi) != 1 or min(pi) < 0:
            raise linalg.ChainError("exact stationary solve failed its own check")
        return StationaryDist(pi, pi[0], speed_excess(pi[0]), "exact", "bareiss", 0.0)
    if m.d <= DENSE_MAX_D:
        pi, method, its = linalg.gth(m.csr.toarray()), "gth", 0
    else:
        pi, its = linalg.power_iteration(m.csr, tol=tol, max_iter=max_iter)
        method = "power"
    resid = float(np.abs(m.csr.T @ pi - pi).max())
    mu = float(pi[0])
    return StationaryDist(pi.tolist(), mu, speed_excess(mu), "float", method, resid, its)


@dataclass
class ChainSampleReport:
    d: int
    steps: int
    seed: int
    white_visits: int
    elapsed: int
    net_distance: int
    frequencies: np.ndarray = field(repr=False)
    white_frequency: float
    white_frequency_se: float
    disc_final: int
    disc_max_abs: int
    disc_increment_mean: float
    disc_increment_se: float
    max_normal_jump: int
    max_reset_jump: int

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "frequencies"}
        out["frequencies"] = self.frequencies.tolist()
        return out


def _batch_se(x: np.ndarray, batches: int = 100) -> float:
    """Standard error of the mean by non-overlapping batch means."""
    n = x.size // batches * batches
    if n == 0:
        return float("nan")
    means = x[:n].reshape(batches, -1).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(batches))


def sample_chain(d: int, steps: int, seed: int, return_paths: bool = False):
    """Run the window process from the all-blue window and summarise it."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if d < 2:
        raise WindowRangeError("window length must be >= 2")
    states, discs = kernels.chain_sample(d, steps, seed)
    visited = states[:-1]
    white = visited == 0
    w = int(white.sum())
    inc = np.diff(discs)
    report = ChainSampleReport(
        d=d, steps=steps, seed=seed, white_visits=w, elapsed=steps - w,
        net_distance=steps - 2 * w,
        frequencies=np.bincount(visited, minlength=1 << d) / steps,
        white_frequency=w / steps,
        white_frequency_se=_batch_se(white.astype(np.float64)),
        disc_final=int(discs[-1]), disc_max_abs=int(np.abs(discs).max()),
        disc_increment_mean=float(inc.mean()), disc_increment_se=_batch_se(inc.astype(np.float64)),
        max_normal_jump=int(np.abs(inc[~white]).max()) if (~white).any() else 0,
        max_reset_jump=int(np.abs(inc[white]).max()) if white.any() else 0,
    )
    if return_paths:
        return report, states, discs
    return report


def mu_table(ds: Iterable[int], mode: str) -> list[tuple[int, Fraction | float, Fraction | float]]:
    return [(d, (s := stationary(build_matrix(d, mode))).mu, s.epsilon) for d in ds]


def table_csv(rows: list[tuple]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["d", "mu_d", "epsilon_d"])
    for d, mu, eps in rows:
        wr.writerow([d, format_value(mu), format_value(eps)])
    return buf.getvalue()


def format_value(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return f"{float(v):.17g}"
