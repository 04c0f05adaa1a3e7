"""Exact expected propagation times on small graphs.

The blue set evolves as an absorbing Markov chain on subsets of V.  One round
turns each white vertex ``v`` blue independently with probability
``1 - prod(1 - |N[u] & Z| / deg(u))`` over its blue neighbours ``u``; distinct
white vertices depend on disjoint sets of edge attempts, hence independence.
"""
from __future__ import annotations

import decimal
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .engine import BlueSet
from .graphs import Graph, eccentricity, orbit_representatives

DEFAULT_CAP = 20


class CapExceededError(ValueError):
    """Graph too large for exact state-space enumeration."""


@dataclass
class EptResult:
    graph_spec: str
    start: str
    value: Fraction
    vertex: int | None = None

    @property
    def ratio(self) -> str:
        return f"{self.value.numerator}/{self.value.denominator}"

    @property
    def decimal(self) -> str:
        return to_decimal(self.value)


def to_decimal(x: Fraction, digits: int = 15) -> str:
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        return str(decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator))


def _mask(g: Graph, blue) -> int:
    if isinstance(blue, BlueSet):
        return blue.mask
    if isinstance(blue, int):
        return blue
    return BlueSet.of(g.n, blue).mask


def vertex_probabilities(g: Graph, mask: int) -> dict[int, Fraction]:
    """Probability that each white vertex with a blue neighbour turns blue."""
    out: dict[int, Fraction] = {}
    closed: dict[int, Fraction] = {}
    for v in range(g.n):
        if (mask >> v) & 1:
            continue
        stay = Fraction(1)
        touched = False
        for u in g.adjacency[v]:
            if (mask >> u) & 1:
                touched = True
                if u not in closed:
                    k = 1 + sum((mask >> w) & 1 for w in g.adjacency[u])
                    closed[u] = Fraction(k, g.degree(u))
                stay *= 1 - closed[u]
        if touched:
            out[v] = 1 - stay
    return out


def _round_law(g: Graph, mask: int) -> list[tuple[int, Fraction]]:
    probs = vertex_probabilities(g, mask)
    law: list[tuple[int, Fraction]] = [(mask, Fraction(1))]
    for v, q in probs.items():
        bit = 1 << v
        if q == 1:
            law = [(m | bit, p) for m, p in law]
        elif q:
            law = [(m, p * (1 - q)) for m, p in law] + [(m | bit, p * q) for m, p in law]
    return law


def round_transition(g: Graph, blue) -> list[tuple[BlueSet, Fraction]]:
    """Law of the blue set after one round, as ``(successor, probability)`` pairs."""
    mask = _mask(g, blue)
    if mask == (1 << g.n) - 1:
        raise ValueError("all vertices are already blue")
    if mask == 0:
        raise ValueError("blue set must be nonempty")
    return [(BlueSet(g.n, m), p) for m, p in sorted(_round_law(g, mask))]


def round_transition_by_edges(g: Graph, blue) -> list[tuple[BlueSet, Fraction]]:
    """Same law by brute force over every blue-to-white edge attempt (test oracle)."""
    mask = _mask(g, blue)
    attempts = []
    for u in range(g.n):
        if not (mask >> u) & 1:
            continue
        k = 1 + sum((mask >> w) & 1 for w in g.adjacency[u])
        p = Fraction(k, g.degree(u))
        for v in g.adjacency[u]:
            if not (mask >> v) & 1:
                attempts.append((v, p))
    law: dict[int, Fraction] = {}
    for outcome in product((False, True), repeat=len(attempts)):
        m, pr = mask, Fraction(1)
        for (v, p), hit in zip(attempts, outcome):
            pr *= p if hit else 1 - p
            if hit:
                m |= 1 << v
        if pr:
            law[m] = law.get(m, Fraction(0)) + pr
    return [(BlueSet(g.n, m), p) for m, p in sorted(law.items())]


class ExactSolver:
    """Memoised expected times and laws for one graph."""

    def __init__(self, g: Graph, cap: int = DEFAULT_CAP):
        if g.n > cap:
            raise CapExceededError(f"{g.n} vertices exceeds the exact cap of {cap}")
        self.g = g
        self.full = (1 << g.n) - 1
        self._laws: dict[int, list[tuple[int, Fraction]]] = {}
        self._ept: dict[int, Fraction] = {self.full: Fraction(0)}

    def law(self, mask: int) -> list[tuple[int, Fraction]]:
        if mask not in self._laws:
            self._laws[mask] = _round_law(self.g, mask)
        return self._laws[mask]

    def expected(self, mask: int) -> Fraction:
        if mask == 0:
            raise ValueError("start set must be nonempty")
        memo = self._ept
        if mask in memo:
            return memo[mask]
        # iterative post-order over strictly larger successors
        stack = [mask]
        while stack:
            z = stack[-1]
            if z in memo:
                stack.pop()
                continue
            pending = [m for m, _ in self.law(z) if m != z and m not in memo]
            if pending:
                stack.extend(pending)
                continue
            stay = Fraction(0)
            acc = Fraction(1)
            for m, p in self.law(z):
                if m == z:
                    stay = p
                else:
                    acc += p * memo[m]
            memo[z] = acc / (1 - stay)
            stack.pop()
        return memo[mask]

    def distribution(self, mask: int, t_max: int) -> list[Fraction]:
        """CDF of the propagation time at t = 0..t_max."""
        dist = {mask: Fraction(1)}
        cdf = []
        for t in range(t_max + 1):
            cdf.append(dist.get(self.full, Fraction(0)))
            if t == t_max:
                break
            nxt: dict[int, Fraction] = {}
            for z, pz in dist.items():
                if z == self.full:
                    nxt[z] = nxt.get(z, Fraction(0)) + pz
                    continue
                for m, p in self.law(z):
                    nxt[m] = nxt.get(m, Fraction(0)) + pz * p
            dist = nxt
        return cdf


def expected_pt(g: Graph, start, cap: int = DEFAULT_CAP) -> Fraction:
    mask = _mask(g, start)
    if mask == 0:
        raise ValueError("start set must be nonempty")
    return ExactSolver(g, cap).expected(mask)


def min_expected_pt(g: Graph, cap: int = DEFAULT_CAP) -> tuple[int, Fraction]:
    """Best single starting vertex and its expected propagation time."""
    solver = ExactSolver(g, cap)
    candidates = orbit_representatives(g) or list(range(g.n))
    best_v, best = None, None
    for v in sorted(candidates):
        e = solver.expected(1 << v)
        if best is None or e < best:
            best_v, best = v, e
    return best_v, best


def pt_distribution(g: Graph, start, t_max: int, cap: int = DEFAULT_CAP) -> list[Fraction]:
    mask = _mask(g, start)
    if mask == 0:
        raise ValueError("start set must be nonempty")
    return ExactSolver(g, cap).distribution(mask, t_max)


def lower_bound(g: Graph, start) -> int:
    return eccentricity(g, BlueSet(g.n, _mask(g, start)).vertices())
