"""Regression checks of the reference constants and the structural invariants."""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from . import window
from .exact import min_expected_pt
from .experiments import coupling_battery
from .graphs import build_graph

F = Fraction

# d = 2 transition matrix, states ordered (0,0), (0,1), (1,0), (1,1) as tuples
P2_REFERENCE = [
    [F(0), F(0), F(0), F(1)],
    [F(1, 16), F(9, 32), F(3, 32), F(9, 16)],
    [F(1, 16), F(3, 32), F(9, 32), F(9, 16)],
    [F(1, 256), F(15, 256), F(15, 256), F(225, 256)],
]
P2_ORDER = [(0, 0), (0, 1), (1, 0), (1, 1)]

MU_EXACT = {
    2: F(1, 77),
    3: F(1861, 491117),
    4: F(11439524, 9092101243),
    5: F(1133763610798567, 2542177028478096119),
    6: F(112666827183116235892325831063, 686127236264864409019398540749761),
    7: F(536778086928248989283123883507309287148693034345565,
         8663791645046173690408989931892492266198652103814670581),
}
EPS_EXACT = {2: F(1, 75), 3: F(1861, 487395)}

# reference (mu_d, eps_d), to the digits available
MU_EPS_FLOAT = {
    2: (0.012987012987012988, 0.013333333333333334),
    3: (0.0037893210782766634, 0.0038182582915294574),
    4: (0.0012581826460420552, 0.001261356680213082),
    5: (0.0004459813766302923, 0.0004463795305453566),
    6: (0.00016420690103551534, 0.00016426084656466706),
    7: (6.1956486134e-5, 6.1964164298e-5),
    8: (2.3776197997e-5, 2.3777328666e-5),
    9: (9.2381456535e-6, 9.2383163433e-6),
    10: (3.6235531968e-6, 3.6235794573e-6),
    11: (1.4319129399e-6, 1.4319170406e-6),
    12: (5.6925354755e-7, 5.6925419565e-7),
    13: (2.2742611942e-7, 2.2742622287e-7),
    14: (9.1236746477e-8, 9.1236763126e-8),
}
FLOAT_RTOL = 1e-8


def closed_form_ept(family: str, n: int) -> Fraction:
    """Minimum expected propagation time from one vertex on a path or cycle (n > 2)."""
    if n % 2:
        return F(n, 2) + F(1, 2)
    return F(n, 2) + (F(2, 3) if family == "path" else F(1, 3))


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}" + (f"  [{self.detail}]" if self.detail else "")


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported not raised
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, ok, detail, time.perf_counter() - t0)


def check_p2(reference=None) -> tuple[bool, str]:
    reference = P2_REFERENCE if reference is None else reference
    m = window.build_matrix(2, "exact")
    for r, rt in enumerate(P2_ORDER):
        i = window.WindowConfig.from_tuple(rt).bits
        for c, ct in enumerate(P2_ORDER):
            j = window.WindowConfig.from_tuple(ct).bits
            got = m.entry(i, j)
            if got != reference[r][c]:
                return False, f"entry {rt}->{ct}: expected {reference[r][c]}, got {got}"
    return True, "16 entries"


def check_mu_exact(d: int, expected: Fraction | None = None) -> tuple[bool, str]:
    expected = MU_EXACT[d] if expected is None else expected
    s = window.stationary(window.build_matrix(d, "exact"))
    if s.mu != expected:
        return False, f"expected {expected}, got {s.mu}"
    if d in EPS_EXACT and s.epsilon != EPS_EXACT[d]:
        return False, f"epsilon expected {EPS_EXACT[d]}, got {s.epsilon}"
    return True, window.format_value(s.mu)


def check_mu_float(d: int, rtol: float = FLOAT_RTOL) -> tuple[bool, str]:
    mu_ref, eps_ref = MU_EPS_FLOAT[d]
    s = window.stationary(window.build_matrix(d, "float"))
    e_mu = abs(s.mu / mu_ref - 1)
    e_eps = abs(s.epsilon / eps_ref - 1)
    ok = e_mu <= rtol and e_eps <= rtol and (d != 14 or s.epsilon < 1e-7)
    return ok, f"mu={s.mu:.12e} rel.err {e_mu:.1e}, eps rel.err {e_eps:.1e}, {s.method}"


def check_closed_form(family: str, n: int) -> tuple[bool, str]:
    _, e = min_expected_pt(build_graph(f"{family}:{n}"))
    want = closed_form_ept(family, n)
    return e == want, f"{e} vs {want}"


def check_invariants(max_d: int = 6) -> tuple[bool, str]:
    for d in range(2, max_d + 1):
        m = window.build_matrix(d, "exact")
        if any(s != 1 for s in m.row_sums()):
            return False, f"row sums at d={d}"
        for c in range(1, 1 << d):
            rc = window.WindowConfig(d, c).reversed().bits
            for j, p in m.rows[c].items():
                if m.rows[rc].get(window.WindowConfig(d, j).reversed().bits) != p:
                    return False, f"reversal symmetry at d={d}, row {c}"
        if m.rows[0].get(0):
            return False, f"all-white row returns to itself at d={d}"
    return True, f"d=2..{max_d}"


def check_coupling(spec: str, trials: int, seed: int) -> tuple[bool, str]:
    rep = coupling_battery(spec, trials, seed)
    return rep.ok, (f"contained {rep.contained}/{rep.rounds} rounds, "
                    f"zf dominated {rep.zf_dominated}/{rep.zf_rounds}")


def checks(max_float_d: int = 14, coupling_trials: int = 200, seed: int = 1) -> Iterator[tuple[str, Callable]]:
    yield "P_2 matrix", check_p2
    for d in sorted(MU_EXACT):
        yield f"mu_{d} exact", lambda d=d: check_mu_exact(d)
    for d in range(2, max_float_d + 1):
        yield f"mu_{d}/eps_{d} float", lambda d=d: check_mu_float(d)
    for fam in ("path", "cycle"):
        for n in range(3, 9):
            yield f"min E[pt] {fam}:{n}", lambda fam=fam, n=n: check_closed_form(fam, n)
    for spec in ("grid:9x9", "hypercube:6"):
        yield f"coupling {spec}", lambda spec=spec: check_coupling(spec, coupling_trials, seed)
    yield "row sums / reversal symmetry", check_invariants


def run_all(**kw) -> list[Check]:
    return [_timed(name, fn) for name, fn in checks(**kw)]
