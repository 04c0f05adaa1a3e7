"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from pzf import _fallback
from pzf._backend import compiled
from pzf.graphs import build_graph


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    g = build_graph("grid:101x101")
    ip, ix = g.csr
    start = np.zeros(g.n, np.uint8)
    start[g.n // 2] = 1
    q = build_graph("hypercube:12")
    qp, qx = q.csr
    qs = np.zeros(q.n, np.uint8)
    qs[0] = 1
    return [
        ("pzf_run grid:101x101", lambda k: k.pzf_run(ip, ix, start, 1, 10**6)),
        ("pzf_run hypercube:12", lambda k: k.pzf_run(qp, qx, qs, 1, 10**6)),
        ("window_matrix_float d=10", lambda k: k.window_matrix_float(10)),
        ("chain_sample d=3, 1e5 steps", lambda k: k.chain_sample(3, 100_000, 1)),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels are not built; only the fallback can be timed")
    print(f"{'kernel':32s} {'fallback':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, fn in cases():
        slow = best_of(lambda: fn(_fallback), args.repeat)
        if compiled is None:
            print(f"{name:32s} {slow:10.4f}")
            continue
        fast = best_of(lambda: fn(compiled), args.repeat)
        print(f"{name:32s} {slow:10.4f} {fast:10.4f} {slow / fast:7.1f}x")


if __name__ == "__main__":
    main()
