from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from pzf import linalg, window
from pzf._backend import kernels
from pzf.graphs import build_graph
from pzf.window import WindowConfig, WindowRangeError, build_matrix, frontier_probs, stationary
from pzf.verification import P2_ORDER, P2_REFERENCE, check_p2

F = Fraction


def oracle_row(c: tuple) -> dict[tuple, Fraction]:
    """Every outcome of W_0..W_d, zero-probability ones included, no shortcuts."""
    d = len(c)
    if not any(c):
        raise ValueError
    probs = []
    for i in range(d + 1):
        blue_nbrs = (c[i - 1] if i > 0 else 0) + (c[i] if i < d else 0)
        probs.append({0: F(0), 1: F(3, 4), 2: F(15, 16)}[blue_nbrs])
    row: dict[tuple, Fraction] = {}
    for w in product((0, 1), repeat=d + 1):
        weight = F(1)
        for wi, p in zip(w, probs):
            weight *= p if wi else 1 - p
        x, y = w[:d], w[1:]
        if sum(x) > sum(y):
            picks = [(x, F(1))]
        elif sum(y) > sum(x):
            picks = [(y, F(1))]
        else:
            picks = [(x, F(1, 2)), (y, F(1, 2))]
        for target, share in picks:
            row[target] = row.get(target, F(0)) + weight * share
    return {k: v for k, v in row.items() if v}


def test_p2_golden():
    m = build_matrix(2, "exact")
    for r, rt in enumerate(P2_ORDER):
        for c, ct in enumerate(P2_ORDER):
            i, j = WindowConfig.from_tuple(rt).bits, WindowConfig.from_tuple(ct).bits
            assert m.entry(i, j) == P2_REFERENCE[r][c]
    assert check_p2() == (True, "16 entries")


def test_p2_negative_control():
    bad = [row[:] for row in P2_REFERENCE]
    bad[1][2] = F(1, 32)
    ok, detail = check_p2(bad)
    assert not ok and "(0, 1)->(1, 0)" in detail


@pytest.mark.parametrize("c,expected", [
    ((1, 1), [F(12, 16), F(15, 16), F(12, 16)]),
    ((1, 0), [F(12, 16), F(12, 16), F(0)]),
    ((0, 1, 0), [F(0), F(12, 16), F(12, 16), F(0)]),
    ((1, 0, 1), [F(12, 16), F(12, 16), F(12, 16), F(12, 16)]),
])
def test_frontier_probs(c, expected):
    assert frontier_probs(c) == expected


def test_reset_rows():
    assert window.transition_row((0, 0)) == {WindowConfig.from_tuple((1, 1)): 1}
    assert window.transition_row((0, 0, 0)) == {WindowConfig.from_tuple((1, 1, 1)): 1}
    assert window.transition_row((0, 0, 0, 0)) == {WindowConfig.from_tuple((1, 1, 1, 0)): F(1, 2),
                                                   WindowConfig.from_tuple((0, 1, 1, 1)): F(1, 2)}
    assert window.transition_row((0,) * 5) == {WindowConfig.from_tuple((0, 1, 1, 1, 0)): 1}


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_rows_match_oracle(d):
    for bits in range(1, 1 << d):
        c = WindowConfig(d, bits)
        got = {k.as_tuple(): v for k, v in window.transition_row(c).items()}
        assert got == oracle_row(c.as_tuple()), c


@pytest.mark.parametrize("d", range(2, 9))
def test_exact_row_sums(d):
    assert all(s == 1 for s in build_matrix(d, "exact").row_sums())


@pytest.mark.parametrize("d", range(2, 8))
def test_float_kernel_matches_exact(d):
    ex = build_matrix(d, "exact")
    fl = build_matrix(d, "float")
    dense = fl.csr.toarray()
    ref = np.array([[float(v) for v in row] for row in ex.dense()])
    assert np.array_equal(dense != 0, ref != 0)
    assert np.allclose(dense, ref, rtol=1e-14, atol=0)
    assert np.abs(dense.sum(axis=1) - 1).max() < 1e-14


@pytest.mark.parametrize("d", range(2, 7))
def test_reversal_symmetry(d):
    m = build_matrix(d, "exact")
    rev = [WindowConfig(d, c).reversed().bits for c in range(1 << d)]
    for c in range(1, 1 << d):
        assert {rev[j]: p for j, p in m.rows[c].items()} == m.rows[rev[c]]
    pi = stationary(m).pi
    assert all(pi[c] == pi[rev[c]] for c in range(1 << d))


@pytest.mark.parametrize("d", range(2, 7))
def test_exact_stationary_is_exact(d):
    m = build_matrix(d, "exact")
    s = stationary(m)
    assert sum(s.pi) == 1 and min(s.pi) > 0
    for j in range(m.size):
        assert sum(s.pi[i] * m.rows[i].get(j, 0) for i in range(m.size)) == s.pi[j]
    assert s.epsilon == s.mu / (1 - 2 * s.mu)


def test_mu_decreasing_and_bounded():
    mus = [stationary(build_matrix(d, "float")).mu for d in range(2, 13)]
    assert mus[0] == pytest.approx(1 / 77, rel=1e-13)
    assert all(b < a for a, b in zip(mus, mus[1:]))


@pytest.mark.parametrize("d", [4, 8, 10])
def test_float_residual(d):
    s = stationary(build_matrix(d, "float"))
    assert s.method == "gth" and s.residual < 1e-15


def test_power_iteration_agrees_with_gth():
    m = build_matrix(9, "float")
    x, _ = linalg.power_iteration(m.csr)
    g = linalg.gth(m.csr.toarray())
    assert abs(x[0] / g[0] - 1) < 1e-9
    assert np.abs(x - g).max() < 1e-12


def test_ergodicity_errors():
    with pytest.raises(linalg.ChainError, match="periodic"):
        linalg.check_ergodic(np.array([0, 1, 2]), np.array([1, 0]), 2)
    with pytest.raises(linalg.ChainError, match="reducible"):
        linalg.check_ergodic(np.array([0, 1, 2]), np.array([0, 1]), 2)
    assert linalg.check_ergodic(*build_matrix(3, "float").pattern(), 8) == 1


def test_range_errors(monkeypatch):
    with pytest.raises(WindowRangeError):
        build_matrix(9, "exact")
    with pytest.raises(WindowRangeError):
        build_matrix(1, "float")
    with pytest.raises(WindowRangeError):
        build_matrix(17, "float")
    n = 1 << 15
    stub = (np.arange(n + 1, dtype=np.int64), np.arange(n, dtype=np.int32), np.ones(n))
    monkeypatch.setattr(window.kernels, "window_matrix_float", lambda d: stub)
    with pytest.warns(RuntimeWarning):
        build_matrix(15, "float")


def test_matrix_json_formats():
    import json
    doc = json.loads(build_matrix(2, "exact").to_json())
    assert doc["format"] == "dense" and doc["matrix"][3][3] == "225/256"
    doc = json.loads(build_matrix(5, "float").to_json())
    assert doc["format"] == "sparse" and all(len(t) == 3 for t in doc["entries"])


def test_table_csv():
    text = window.table_csv(window.mu_table([2, 3], "exact"))
    assert text.splitlines() == ["d,mu_d,epsilon_d", "2,1/77,1/75", "3,1861/491117,1861/487395"]


# sampler

@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_sampler_bookkeeping(d):
    rep, states, discs = window.sample_chain(d, 50_000, 7, return_paths=True)
    inc = np.diff(discs)
    white = states[:-1] == 0
    assert set(np.unique(inc[~white])) <= {-1, 1}
    assert rep.max_reset_jump <= d + 1
    assert discs[0] == 0 and rep.disc_final == discs[-1]
    targets = set(window.reset_targets(d))
    assert set(states[1:][white].tolist()) <= targets
    # every observed move has positive probability
    m = build_matrix(d, "float")
    pairs = set(zip(states[:-1].tolist(), states[1:].tolist()))
    assert all(m.csr[i, j] > 0 for i, j in pairs)


def test_sampler_frequencies_d3():
    rep = window.sample_chain(3, 400_000, 3)
    pi = np.array(stationary(build_matrix(3, "float")).pi)
    n = rep.steps
    z = np.abs(rep.frequencies - pi) / np.sqrt(pi * (1 - pi) / n)
    # correlated draws inflate the variance; allow a generous factor
    assert z.max() < 8


def test_sampler_white_frequency_d2():
    rep = window.sample_chain(2, 400_000, 11)
    assert abs(rep.white_frequency - 1 / 77) < 4 * rep.white_frequency_se


def test_sampler_replay():
    a = window.sample_chain(4, 10_000, 5).to_dict()
    b = window.sample_chain(4, 10_000, 5).to_dict()
    assert a == b


# cross-check the frontier law on an actual grid

def _place(g, d, bits, a, b):
    """Blue set realising window ``bits`` with corner (a, b); returns (mask array, W vertex ids)."""
    blue = np.zeros(g.n, np.uint8)
    for k in range(d):
        if (bits >> k) & 1:
            x, y = a - d + 1 + k, b - k
            for dx in range(3):
                for dy in range(3):
                    blue[g.vertex_at((x - dx, y - dy))] = 1
    w = [g.vertex_at((a - d + 1 + i, b + 1 - i)) for i in range(d + 1)]
    return blue, w


@pytest.mark.parametrize("d", [2, 3, 4])
def test_frontier_probs_on_grid(d):
    g = build_graph("grid:61x61")
    ip, ix = g.csr
    configs = list(range(1, 1 << d))
    corners = [(a, b) for a in range(-22, 27, 12) for b in range(-22, 27, 12)]
    blue = np.zeros(g.n, np.uint8)
    layout = []
    for idx, corner in enumerate(corners):
        bits = configs[idx % len(configs)]
        part, w = _place(g, d, bits, *corner)
        blue |= part
        layout.append((bits, w))
    for bits, w in layout:
        assert not blue[w].any()
    hits = {bits: np.zeros(d + 1) for bits in configs}
    draws = dict.fromkeys(configs, 0)
    steps = 1500
    for s in range(steps):
        nxt = kernels.pzf_step(ip, ix, blue, s, 0)
        for bits, w in layout:
            hits[bits] += nxt[w]
            draws[bits] += 1
    for bits in configs:
        p = np.array([float(x) for x in frontier_probs(WindowConfig(d, bits))])
        freq = hits[bits] / draws[bits]
        se = np.sqrt(np.maximum(p * (1 - p), 1e-12) / draws[bits])
        assert np.all(freq[p == 0] == 0)
        assert np.all(np.abs(freq - p) < 4.5 * se + 1e-12), (bits, freq, p)
