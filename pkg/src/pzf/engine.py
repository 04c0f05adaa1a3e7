"""Probabilistic zero forcing rounds, classical zero forcing, and coupled runs.

Every blue vertex ``u`` tries to force each white neighbour ``v`` in round
``t``; the attempt succeeds when the keyed word for ``(seed, t, u, v)`` lies
below ``|N[u] & blue| / deg(u)`` of the 64-bit range.  Rounds are
synchronous: all probabilities use the round-start blue set.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from ._backend import kernels
from ._random import edge_bits
from .graphs import Graph


class CouplingError(ValueError):
    """Start sets are not nested."""


class BlueSet:
    """Blue vertices of a graph, packed into the bits of an integer."""

    __slots__ = ("n", "mask")

    def __init__(self, n: int, mask: int = 0):
        if mask >> n:
            raise ValueError("blue set refers to vertices outside the graph")
        self.n = n
        self.mask = mask

    @classmethod
    def of(cls, n: int, vertices: Iterable[int]) -> "BlueSet":
        mask = 0
        for v in vertices:
            if not 0 <= v < n:
                raise ValueError(f"vertex {v} not in graph")
            mask |= 1 << int(v)
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "BlueSet":
        return cls(n, (1 << n) - 1)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BlueSet":
        return cls.of(len(arr), np.flatnonzero(arr).tolist())

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.uint8)
        out[self.vertices()] = 1
        return out

    def vertices(self) -> list[int]:
        m, out = self.mask, []
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return out

    def __contains__(self, v: int) -> bool:
        return (self.mask >> v) & 1 == 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices())

    def __eq__(self, other) -> bool:
        return isinstance(other, BlueSet) and (self.n, self.mask) == (other.n, other.mask)

    def __hash__(self) -> int:
        return hash((self.n, self.mask))

    def __le__(self, other: "BlueSet") -> bool:
        return self.mask & ~other.mask == 0

    def __or__(self, other: "BlueSet") -> "BlueSet":
        return BlueSet(self.n, self.mask | other.mask)

    def __repr__(self) -> str:
        return f"BlueSet(n={self.n}, {self.vertices()})"

    @property
    def is_full(self) -> bool:
        return self.mask == (1 << self.n) - 1

    def describe(self) -> str:
        vs = self.vertices()
        if len(vs) <= 8:
            return "{" + ",".join(map(str, vs)) + "}"
        return f"<{len(vs)} vertices>"


def force_probability(g: Graph, blue: BlueSet, u: int) -> Fraction:
    if not 0 <= u < g.n:
        raise ValueError(f"vertex {u} not in graph")
    if u not in blue:
        raise ValueError(f"vertex {u} is not blue")
    closed = 1 + sum(1 for w in g.adjacency[u] if w in blue)
    return Fraction(closed, g.degree(u))


class EdgeRandomSource:
    """Replay-stable uniforms keyed by ``(round, u, v)``."""

    def __init__(self, seed: int):
        self.seed = int(seed)

    def bits(self, t: int, u: int, v: int) -> int:
        return edge_bits(self.seed, t, u, v)

    def uniform(self, t: int, u: int, v: int) -> float:
        return self.bits(t, u, v) / 2.0**64


def default_max_rounds(g: Graph) -> int:
    return 50 * (g.n + g.diameter)


def _as_array(g: Graph, blue) -> np.ndarray:
    if isinstance(blue, BlueSet):
        if blue.n != g.n:
            raise ValueError("blue set belongs to a different graph")
        return blue.to_array()
    if isinstance(blue, np.ndarray):
        return np.ascontiguousarray(blue, dtype=np.uint8)
    return BlueSet.of(g.n, blue).to_array()


def step(g: Graph, blue: BlueSet, rnd: EdgeRandomSource | int, t: int) -> BlueSet:
    """One synchronous round."""
    seed = rnd.seed if isinstance(rnd, EdgeRandomSource) else int(rnd)
    indptr, indices = g.csr
    out = kernels.pzf_step(indptr, indices, _as_array(g, blue), seed, t)
    return BlueSet.from_array(out)


@dataclass
class TrialRecord:
    seed: int
    start: str
    pt: int | None
    blue_counts: list[int]
    graph_spec: str
    n: int = 0
    zero_forcing_set: bool | None = None
    extra: dict = field(default_factory=dict)

    @property
    def finished(self) -> bool:
        return self.pt is not None

    @property
    def rounds_to_half(self) -> int | None:
        for t, c in enumerate(self.blue_counts):
            if 2 * c >= self.n:
                return t
        return None

    @property
    def final_round_count(self) -> int:
        return self.blue_counts[-1]

    def to_json(self) -> str:
        doc = {"graph": self.graph_spec, "start": self.start, "seed": self.seed, "pt": self.pt,
               "n": self.n, "blue_counts": self.blue_counts}
        if self.zero_forcing_set is not None:
            doc["zero_forcing_set"] = self.zero_forcing_set
        return json.dumps(doc)


def _record(g: Graph, start, seed: int, counts: list[int], finished: bool, label: str | None) -> TrialRecord:
    return TrialRecord(seed=int(seed), start=label or _label(g, start),
                       pt=len(counts) - 1 if finished else None, blue_counts=list(counts),
                       graph_spec=g.spec, n=g.n)


def _label(g: Graph, start) -> str:
    if isinstance(start, BlueSet):
        return start.describe()
    if isinstance(start, np.ndarray):
        return BlueSet.from_array(start).describe()
    return BlueSet.of(g.n, start).describe()


def run(g: Graph, start, seed: int, max_rounds: int | None = None, label: str | None = None) -> TrialRecord:
    """Run until every vertex is blue or ``max_rounds`` rounds have passed."""
    arr = _as_array(g, start)
    if not arr.any():
        raise ValueError("start set must be nonempty")
    if max_rounds is None:
        max_rounds = default_max_rounds(g)
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    indptr, indices = g.csr
    counts, finished = kernels.pzf_run(indptr, indices, arr, int(seed), int(max_rounds))
    return _record(g, start, seed, counts, finished, label)


def trajectory(g: Graph, start, seed: int, max_rounds: int | None = None) -> Iterator[np.ndarray]:
    """Yield the blue indicator array at rounds 0, 1, ... until all blue."""
    cur = _as_array(g, start)
    if max_rounds is None:
        max_rounds = default_max_rounds(g)
    indptr, indices = g.csr
    yield cur
    t = 0
    while not cur.all() and t < max_rounds:
        cur = kernels.pzf_step(indptr, indices, cur, seed, t)
        t += 1
        yield cur


def zf_step(g: Graph, blue: np.ndarray) -> np.ndarray:
    """Classical rule: a blue vertex with exactly one white neighbour forces it."""
    out = blue.copy()
    for u in np.flatnonzero(blue):
        white = [v for v in g.adjacency[u] if not blue[v]]
        if len(white) == 1:
            out[white[0]] = 1
    return out


def zf_trajectory(g: Graph, start, max_rounds: int | None = None) -> Iterator[np.ndarray]:
    cur = _as_array(g, start)
    if max_rounds is None:
        max_rounds = default_max_rounds(g)
    yield cur
    t = 0
    while not cur.all() and t < max_rounds:
        nxt = zf_step(g, cur)
        if np.array_equal(nxt, cur):
            return
        cur = nxt
        t += 1
        yield cur


def run_deterministic_zf(g: Graph, start, max_rounds: int | None = None) -> TrialRecord:
    """Classical zero forcing; ``pt`` is None when the process stalls."""
    if max_rounds is None:
        max_rounds = default_max_rounds(g)
    counts = [int(a.sum()) for a in zf_trajectory(g, start, max_rounds)]
    done = counts[-1] == g.n
    rec = _record(g, start, 0, counts, done, None)
    rec.zero_forcing_set = done
    rec.extra["stalled"] = not done and len(counts) - 1 < max_rounds
    return rec


def _check_nested(g: Graph, s1, s2) -> tuple[np.ndarray, np.ndarray]:
    a1, a2 = _as_array(g, s1), _as_array(g, s2)
    if np.any(a1 & ~a2):
        raise CouplingError("coupled runs need s1 to be a subset of s2")
    return a1, a2


def coupled_run(g: Graph, s1, s2, seed: int, max_rounds: int | None = None) -> tuple[TrialRecord, TrialRecord]:
    """Run from nested starts on shared randomness."""
    _check_nested(g, s1, s2)
    return run(g, s1, seed, max_rounds), run(g, s2, seed, max_rounds)


@dataclass
class CouplingReport:
    rounds: int = 0
    contained: int = 0
    zf_rounds: int = 0
    zf_dominated: int = 0
    pt_order_ok: bool = True

    def __iadd__(self, other: "CouplingReport") -> "CouplingReport":
        self.rounds += other.rounds
        self.contained += other.contained
        self.zf_rounds += other.zf_rounds
        self.zf_dominated += other.zf_dominated
        self.pt_order_ok &= other.pt_order_ok
        return self

    @property
    def ok(self) -> bool:
        return (self.contained == self.rounds and self.zf_dominated == self.zf_rounds
                and self.pt_order_ok)


def _padded(frames: list[np.ndarray], length: int) -> list[np.ndarray]:
    return frames + [frames[-1]] * (length - len(frames))


def coupling_check(g: Graph, s1, s2, seed: int, max_rounds: int | None = None) -> CouplingReport:
    """Round-wise containment of the coupled runs, and domination of classical zero forcing."""
    a1, a2 = _check_nested(g, s1, s2)
    t1 = list(trajectory(g, a1, seed, max_rounds))
    t2 = list(trajectory(g, a2, seed, max_rounds))
    zf = list(zf_trajectory(g, a1, max_rounds))
    length = max(len(t1), len(t2))
    rep = CouplingReport(rounds=length)
    for b1, b2 in zip(_padded(t1, length), _padded(t2, length)):
        rep.contained += not np.any(b1 & ~b2)
    zlen = max(len(t1), len(zf))
    rep.zf_rounds = zlen
    for p, z in zip(_padded(t1, zlen), _padded(zf, zlen)):
        rep.zf_dominated += not np.any(z & ~p)
    rep.pt_order_ok = len(t2) <= len(t1)
    return rep
