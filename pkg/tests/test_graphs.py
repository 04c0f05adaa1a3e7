from collections import Counter

import pytest

from pzf.graphs import (Coord, DisconnectedGraphError, FamilyError, GraphSpecError, bfs_distances,
                        build_graph, eccentricity, hypercube_level, orbit_representatives, origin,
                        principal_square)


def test_path3():
    g = build_graph("path:3")
    assert g.n == 3
    assert g.edges() == [(0, 1), (1, 2)]


def test_hypercube3():
    g = build_graph("hypercube:3")
    assert (g.n, g.num_edges) == (8, 12)
    assert all(g.degree(v) == 3 for v in range(8))


def test_grid2x3():
    g = build_graph("grid:2x3")
    assert (g.n, g.num_edges) == (6, 7)


@pytest.mark.parametrize("spec", ["hypercube:5", "grid:4x7", "torus:5x6", "path:9", "cycle:8",
                                  "complete:6", "star:5", "gnp:40:0.3:7"])
def test_adjacency_symmetric_and_simple(spec):
    g = build_graph(spec)
    for v, nbrs in enumerate(g.adjacency):
        assert list(nbrs) == sorted(set(nbrs))
        assert v not in nbrs
        for u in nbrs:
            assert v in g.adjacency[u]


def test_large_grid_symmetry():
    g = build_graph("grid:100x100")
    assert all(v in g.adjacency[u] for v in range(g.n) for u in g.adjacency[v])


@pytest.mark.parametrize("spec,expected", [
    ("hypercube:6", {6: 64}),
    ("torus:5x7", {4: 35}),
    ("grid:5x6", {2: 4, 3: 2 * (3 + 4), 4: 3 * 4}),
    ("cycle:7", {2: 7}),
    ("star:4", {4: 1, 1: 4}),
    ("complete:5", {4: 5}),
])
def test_degree_sequences(spec, expected):
    g = build_graph(spec)
    assert Counter(g.degree(v) for v in range(g.n)) == expected


@pytest.mark.parametrize("bad", ["path:1", "path", "grid:3", "grid:axb", "hypercube:0", "torus:2x5",
                                 "nope:3", "gnp:10:0.5", "cycle:2", "star:0", ""])
def test_bad_specs(bad):
    with pytest.raises(GraphSpecError):
        build_graph(bad)


def test_gnp_disconnected_is_distinct_error():
    with pytest.raises(DisconnectedGraphError):
        build_graph("gnp:30:0.0:1")


def test_gnp_reproducible():
    assert build_graph("gnp:25:0.3:5").adjacency == build_graph("gnp:25:0.3:5").adjacency


def test_file_graph(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n2 0\n2 3\n")
    g = build_graph(f"file:{p}")
    assert g.n == 4 and g.num_edges == 4
    p.write_text("0 1\n2 3\n")
    with pytest.raises(DisconnectedGraphError):
        build_graph(f"file:{p}")
    p.write_text("0 0\n")
    with pytest.raises(GraphSpecError):
        build_graph(f"file:{p}")


@pytest.mark.parametrize("v,level", [(0b000, 0), (0b101, 2)])
def test_hypercube_level_q3(v, level):
    assert hypercube_level(build_graph("hypercube:3"), v) == level


def test_hypercube_level_neighbours():
    g = build_graph("hypercube:4")
    assert hypercube_level(g, 0b1111) == 4
    for v in range(g.n):
        k = hypercube_level(g, v)
        levels = Counter(hypercube_level(g, u) for u in g.adjacency[v])
        assert levels[k - 1] == k and levels[k + 1] == 4 - k
    with pytest.raises(FamilyError):
        hypercube_level(build_graph("path:3"), 0)


def test_origin():
    g5 = build_graph("grid:5x5")
    assert g5.coord(origin(g5)) == Coord(0, 0)
    assert origin(g5) == 12
    g4 = build_graph("grid:4x4")
    # lower-left of the central four: row 1, column 1
    assert origin(g4) == 5
    central = {g4.vertex_at((a, b)) for a in (0, 1) for b in (0, 1)}
    assert origin(g4) == min(central, key=lambda v: tuple(g4.coord(v)))
    assert origin(build_graph("hypercube:6")) == 0
    assert origin(build_graph("torus:4x4")) == 0
    with pytest.raises(FamilyError):
        origin(build_graph("path:4"))


@pytest.mark.parametrize("spec,k,size", [("grid:5x5", 0, 1), ("grid:5x5", 1, 9), ("grid:7x7", 2, 25),
                                         ("torus:7x7", 3, 49)])
def test_principal_square(spec, k, size):
    g = build_graph(spec)
    sq = principal_square(g, k)
    assert len(sq) == size
    assert all(max(abs(c) for c in g.coord(v)) <= k for v in sq) or g.family == "torus"


def test_principal_squares_nested():
    g = build_graph("grid:9x9")
    for k in range(3):
        assert principal_square(g, k) < principal_square(g, k + 1)
    with pytest.raises(ValueError):
        principal_square(g, 5)
    with pytest.raises(ValueError):
        principal_square(build_graph("grid:4x4"), 2)


def test_eccentricity_examples():
    assert eccentricity(build_graph("path:5"), 0) == 4
    q7 = build_graph("hypercube:7")
    assert all(eccentricity(q7, v) == 7 for v in (0, 5, 127))
    g = build_graph("grid:5x5")
    assert eccentricity(g, origin(g)) == 4


@pytest.mark.parametrize("m,n", [(5, 5), (7, 7), (4, 4), (6, 9), (1, 8)])
def test_grid_eccentricity_matches_manhattan(m, n):
    g = build_graph(f"grid:{m}x{n}")
    o = origin(g)
    dist = bfs_distances(g, [o])
    oc = g.coord(o)
    for v, dv in dist.items():
        c = g.coord(v)
        assert dv == abs(c.a - oc.a) + abs(c.b - oc.b)
    assert eccentricity(g, o) == max(dist.values())
    if m == n and n % 2:
        assert eccentricity(g, o) == n - 1


def test_set_eccentricity():
    g = build_graph("path:7")
    assert eccentricity(g, [0, 6]) == 3


@pytest.mark.parametrize("spec", ["path:6", "path:7", "grid:3x4", "grid:4x4", "star:3", "cycle:5"])
def test_orbit_representatives_cover_all_vertices(spec):
    from pzf.exact import expected_pt
    g = build_graph(spec)
    reps = orbit_representatives(g)
    values = {v: expected_pt(g, [v]) for v in range(g.n)}
    assert set(values[v] for v in reps) == set(values.values())
