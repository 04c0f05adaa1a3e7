"""Graph families: hypercubes, grids, tori, paths, cycles and friends.

Graphs are parsed from a small spec language::

    hypercube:N  grid:MxN  torus:MxN  path:N  cycle:N
    complete:N   star:N    gnp:N:P:SEED  file:PATH

Grid and torus vertices are numbered row-major (``id = row * N + col`` for an
``M x N`` grid with ``M`` rows); hypercube vertices are the integer value of
their binary string.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

FAMILIES = ("hypercube", "grid", "torus", "path", "cycle", "complete", "star", "gnp", "file")


class GraphSpecError(ValueError):
    """Malformed graph spec or parameters out of range."""


class DisconnectedGraphError(ValueError):
    """The constructed graph is not connected."""


class FamilyError(ValueError):
    """Operation not defined for this graph family."""


class Coord(NamedTuple):
    """Grid coordinates relative to the origin; ``a`` is the column offset."""

    a: int
    b: int


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    family: str
    params: tuple = ()
    spec: str = ""

    def __post_init__(self):
        if self.n < 2:
            raise GraphSpecError("graphs need at least 2 vertices")
        if len(self.adjacency) != self.n:
            raise GraphSpecError("adjacency length does not match vertex count")
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if u == v:
                    raise GraphSpecError(f"self-loop at vertex {v}")
                if not 0 <= u < self.n:
                    raise GraphSpecError(f"vertex id {u} out of range")
        if not self.is_connected():
            raise DisconnectedGraphError(f"graph {self.spec or self.family} is disconnected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], family: str,
                   params: tuple = (), spec: str = "") -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphSpecError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphSpecError(f"edge ({u}, {v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        adjacency = tuple(tuple(sorted(s)) for s in nbrs)
        return cls(n, adjacency, family, tuple(params), spec)

    def __repr__(self) -> str:
        return f"Graph({self.spec or self.family!r}, n={self.n}, m={self.num_edges})"

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` arrays (int64, int32) for the kernels."""
        degs = np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(degs, out=indptr[1:])
        indices = np.fromiter((u for a in self.adjacency for u in a), dtype=np.int32,
                              count=int(indptr[-1]))
        return indptr, indices

    def is_connected(self) -> bool:
        return len(bfs_distances(self, [0])) == self.n

    @cached_property
    def diameter(self) -> int:
        if self.family == "hypercube":
            return self.params[0]
        if self.family == "grid":
            m, n = self.params
            return m + n - 2
        if self.family == "torus":
            m, n = self.params
            return m // 2 + n // 2
        if self.family == "path":
            return self.n - 1
        if self.family == "cycle":
            return self.n // 2
        if self.family in ("complete",):
            return 1
        if self.family == "star":
            return 2
        return max(eccentricity(self, v) for v in range(self.n))

    # grid helpers -----------------------------------------------------

    def _grid_dims(self) -> tuple[int, int]:
        if self.family not in ("grid", "torus"):
            raise FamilyError(f"{self.family} graphs have no grid coordinates")
        return self.params

    def coord(self, v: int) -> Coord:
        """Coordinates of ``v`` relative to the origin (grid and torus)."""
        m, n = self._grid_dims()
        row, col = divmod(v, n)
        if self.family == "torus":
            return Coord(col, row)
        return Coord(col - (n - 1) // 2, row - (m - 1) // 2)

    def vertex_at(self, c: Coord | tuple[int, int]) -> int:
        m, n = self._grid_dims()
        a, b = c
        if self.family == "torus":
            return (b % m) * n + (a % n)
        col, row = a + (n - 1) // 2, b + (m - 1) // 2
        if not (0 <= col < n and 0 <= row < m):
            raise ValueError(f"coordinate {tuple(c)} lies outside the grid")
        return row * n + col


# constructors ---------------------------------------------------------

def hypercube(dim: int, spec: str = "") -> Graph:
    if dim < 1:
        raise GraphSpecError("hypercube dimension must be >= 1")
    n = 1 << dim
    adjacency = tuple(tuple(sorted(v ^ (1 << i) for i in range(dim))) for v in range(n))
    return Graph(n, adjacency, "hypercube", (dim,), spec or f"hypercube:{dim}")


def grid(m: int, n: int, spec: str = "") -> Graph:
    if m < 1 or n < 1 or m * n < 2:
        raise GraphSpecError("grid needs at least 2 vertices")
    edges = []
    for r in range(m):
        for c in range(n):
            v = r * n + c
            if c + 1 < n:
                edges.append((v, v + 1))
            if r + 1 < m:
                edges.append((v, v + n))
    return Graph.from_edges(m * n, edges, "grid", (m, n), spec or f"grid:{m}x{n}")


def torus(m: int, n: int, spec: str = "") -> Graph:
    if m < 3 or n < 3:
        raise GraphSpecError("torus sides must be >= 3 to stay simple")
    edges = []
    for r in range(m):
        for c in range(n):
            v = r * n + c
            edges.append((v, r * n + (c + 1) % n))
            edges.append((v, ((r + 1) % m) * n + c))
    return Graph.from_edges(m * n, edges, "torus", (m, n), spec or f"torus:{m}x{n}")


def path(n: int, spec: str = "") -> Graph:
    if n < 2:
        raise GraphSpecError("path needs at least 2 vertices")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], "path", (n,), spec or f"path:{n}")


def cycle(n: int, spec: str = "") -> Graph:
    if n < 3:
        raise GraphSpecError("cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], "cycle", (n,),
                            spec or f"cycle:{n}")


def complete(n: int, spec: str = "") -> Graph:
    if n < 2:
        raise GraphSpecError("complete graph needs at least 2 vertices")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return Graph.from_edges(n, edges, "complete", (n,), spec or f"complete:{n}")


def star(leaves: int, spec: str = "") -> Graph:
    """K_{1,leaves} with centre 0."""
    if leaves < 1:
        raise GraphSpecError("star needs at least one leaf")
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)], "star",
                            (leaves,), spec or f"star:{leaves}")


def gnp(n: int, p: float, seed: int, spec: str = "") -> Graph:
    if n < 2 or not 0.0 <= p <= 1.0:
        raise GraphSpecError("gnp needs n >= 2 and 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    edges = zip(iu[keep].tolist(), ju[keep].tolist())
    return Graph.from_edges(n, edges, "gnp", (n, p, seed), spec or f"gnp:{n}:{p}:{seed}")


def from_edge_list(path_: str | Path, spec: str = "") -> Graph:
    text = Path(path_).read_text()
    tokens = text.split()
    if len(tokens) % 2:
        raise GraphSpecError(f"{path_}: odd number of vertex ids")
    try:
        ids = [int(t) for t in tokens]
    except ValueError as exc:
        raise GraphSpecError(f"{path_}: {exc}") from None
    if not ids:
        raise GraphSpecError(f"{path_}: no edges")
    if min(ids) < 0:
        raise GraphSpecError(f"{path_}: negative vertex id")
    edges = list(zip(ids[::2], ids[1::2]))
    return Graph.from_edges(max(ids) + 1, edges, "file", (str(path_),), spec or f"file:{path_}")


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise GraphSpecError(f"{what}: expected an integer, got {text!r}") from None


def _dims(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise GraphSpecError(f"expected MxN, got {text!r}")
    return _int(parts[0], "rows"), _int(parts[1], "columns")


def build_graph(spec: str) -> Graph:
    """Parse a graph spec string and construct the graph."""
    family, sep, rest = spec.strip().partition(":")
    if not sep or not rest:
        raise GraphSpecError(f"malformed graph spec {spec!r}")
    if family == "hypercube":
        return hypercube(_int(rest, family), spec)
    if family == "grid":
        return grid(*_dims(rest), spec)
    if family == "torus":
        return torus(*_dims(rest), spec)
    if family == "path":
        return path(_int(rest, family), spec)
    if family == "cycle":
        return cycle(_int(rest, family), spec)
    if family == "complete":
        return complete(_int(rest, family), spec)
    if family == "star":
        return star(_int(rest, family), spec)
    if family == "gnp":
        parts = rest.split(":")
        if len(parts) != 3:
            raise GraphSpecError("gnp spec is gnp:N:P:SEED")
        try:
            p = float(parts[1])
        except ValueError:
            raise GraphSpecError(f"bad edge probability {parts[1]!r}") from None
        return gnp(_int(parts[0], "n"), p, _int(parts[2], "seed"), spec)
    if family == "file":
        return from_edge_list(rest, spec)
    raise GraphSpecError(f"unknown graph family {family!r}")


# geometry -------------------------------------------------------------

def bfs_distances(g: Graph, sources: Iterable[int]) -> dict[int, int]:
    dist = {s: 0 for s in sources}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        for u in g.adjacency[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def eccentricity(g: Graph, v: int | Sequence[int]) -> int:
    """Largest BFS distance from ``v`` (or from the nearest vertex of a set)."""
    sources = [v] if isinstance(v, (int, np.integer)) else list(v)
    if not sources:
        raise ValueError("eccentricity of an empty set")
    return max(bfs_distances(g, sources).values())


def hypercube_level(g: Graph, v: int) -> int:
    if g.family != "hypercube":
        raise FamilyError("levels are defined on hypercubes only")
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} not in graph")
    return int(v).bit_count()


def origin(g: Graph) -> int:
    """Central vertex of a grid (lower-left of the central four when even), or vertex 0."""
    if g.family == "grid":
        return g.vertex_at(Coord(0, 0))
    if g.family in ("torus", "hypercube"):
        return 0
    raise FamilyError(f"no origin defined for {g.family} graphs")


def principal_square(g: Graph, k: int) -> frozenset[int]:
    """Vertices within sup-distance ``k`` of the origin."""
    if g.family not in ("grid", "torus"):
        raise FamilyError("principal squares need a grid or torus")
    m, n = g.params
    if k < 0:
        raise ValueError("k must be non-negative")
    if g.family == "grid":
        ok = k <= min((m - 1) // 2, m // 2, (n - 1) // 2, n // 2)
    else:
        ok = 2 * k < min(m, n)
    if not ok:
        raise ValueError(f"k={k} out of range for {g.spec}")
    return frozenset(g.vertex_at(Coord(a, b)) for a in range(-k, k + 1) for b in range(-k, k + 1))


def orbit_representatives(g: Graph) -> list[int] | None:
    """Smallest vertex of each automorphism orbit for built-in families, else None."""
    if g.family in ("cycle", "torus", "hypercube", "complete"):
        return [0]
    if g.family == "path":
        return list(range((g.n + 1) // 2))
    if g.family == "star":
        return [0, 1]
    if g.family == "grid":
        m, n = g.params
        reps = set()
        for r in range(m):
            for c in range(n):
                images = [(r, c), (m - 1 - r, c), (r, n - 1 - c), (m - 1 - r, n - 1 - c)]
                if m == n:
                    images += [(cc, rr) for rr, cc in images]
                reps.add(min(rr * n + cc for rr, cc in images))
        return sorted(reps)
    return None
