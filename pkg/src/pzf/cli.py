"""Command-line entry point: ``pzf {simulate,exact,chain,verify,couple-test}``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import exact, experiments, verification, window
from ._backend import BACKEND
from .graphs import DisconnectedGraphError, FamilyError, GraphSpecError, build_graph

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _d_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        return range(int(lo), int(hi if sep else lo) + 1)
    except ValueError:
        raise UsageError(f"bad range {text!r}; use A..B") from None


def cmd_simulate(args) -> int:
    cfg = experiments.ExperimentConfig(args.graph, args.start, args.trials, args.seed,
                                       args.max_rounds, args.workers, args.out, args.format)
    summary, records = experiments.simulate(cfg)
    doc = {"graph": cfg.graph, "start": cfg.start, "seed": cfg.seed, "backend": BACKEND,
           "summary": summary.to_dict()}
    sys.stdout.write(json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


def cmd_exact(args) -> int:
    g = build_graph(args.graph)
    if args.min:
        v, value = exact.min_expected_pt(g, cap=args.cap)
        res = exact.EptResult(g.spec, f"vertex:{v}", value, v)
    else:
        start = experiments.resolve_start(g, args.start)
        if start is None:
            raise UsageError("use --min for the best single start")
        res = exact.EptResult(g.spec, args.start, exact.expected_pt(g, start, cap=args.cap))
    if args.format == "json":
        _emit(json.dumps({"graph": res.graph_spec, "start": res.start, "vertex": res.vertex,
                          "expected_pt": res.ratio, "decimal": res.decimal}), args.out)
    else:
        _emit(f"{res.graph_spec} {res.start} {res.ratio} {res.decimal}", args.out)
    return EXIT_OK


def cmd_chain(args) -> int:
    mode = "float" if args.float else "exact"
    if args.table:
        rows = window.mu_table(_d_range(args.table), mode)
        _emit(window.table_csv(rows), args.out)
        return EXIT_OK
    if args.d is None:
        raise UsageError("window length d is required")
    if args.sample:
        rep = window.sample_chain(args.d, args.sample, args.seed)
        _emit(json.dumps(rep.to_dict()), args.out)
        return EXIT_OK
    m = window.build_matrix(args.d, mode)
    if args.matrix:
        _emit(m.to_json(), args.out)
        return EXIT_OK
    s = window.stationary(m)
    doc = {"d": args.d, "mode": mode, "method": s.method, "mu": window.format_value(s.mu),
           "epsilon": window.format_value(s.epsilon), "residual": s.residual,
           "pi": [window.format_value(p) for p in s.pi] if args.d <= 8 else None}
    _emit(json.dumps(doc), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    ok = True
    lines = []
    for name, fn in verification.checks(args.max_float_d, args.coupling_trials, args.seed):
        chk = verification._timed(name, fn)
        ok &= chk.ok
        lines.append(chk.line())
        print(chk.line(), flush=True)
    if args.out:
        _emit("\n".join(lines), args.out)
    print("all checks passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_couple(args) -> int:
    rep = experiments.coupling_battery(args.graph, args.trials, args.seed, args.max_rounds)
    doc = {"graph": args.graph, "trials": args.trials, "seed": args.seed, "rounds": rep.rounds,
           "contained": rep.contained, "zf_rounds": rep.zf_rounds, "zf_dominated": rep.zf_dominated,
           "pt_order_ok": rep.pt_order_ok, "ok": rep.ok}
    _emit(json.dumps(doc), args.out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pzf", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="Monte Carlo propagation times")
    s.add_argument("graph")
    s.add_argument("--start", default="origin",
                   help="vertex:ID | origin | principal:K | min-over-vertices")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--max-rounds", type=int, default=None)
    s.add_argument("--workers", type=int, default=experiments.default_workers())
    s.add_argument("--out")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("exact", help="exact expected propagation time")
    e.add_argument("graph")
    grp = e.add_mutually_exclusive_group(required=True)
    grp.add_argument("--start")
    grp.add_argument("--min", action="store_true")
    e.add_argument("--cap", type=int, default=exact.DEFAULT_CAP)
    e.add_argument("--format", choices=("text", "json"), default="text")
    e.add_argument("--out")
    e.set_defaults(func=cmd_exact)

    c = sub.add_parser("chain", help="d-window chain: matrix, stationary law, table, sampling")
    c.add_argument("d", type=int, nargs="?")
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--float", action="store_true")
    what = c.add_mutually_exclusive_group(required=True)
    what.add_argument("--matrix", action="store_true")
    what.add_argument("--stationary", action="store_true")
    what.add_argument("--table", metavar="A..B")
    what.add_argument("--sample", type=int, metavar="STEPS")
    c.add_argument("--seed", type=_seed, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_chain)

    v = sub.add_parser("verify", help="check the reference constants and invariants")
    v.add_argument("--max-float-d", type=int, default=14)
    v.add_argument("--coupling-trials", type=int, default=200)
    v.add_argument("--seed", type=_seed, default=1)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("couple-test", help="coupling containment battery")
    k.add_argument("graph")
    k.add_argument("--trials", type=int, default=1000)
    k.add_argument("--seed", type=_seed, default=0)
    k.add_argument("--max-rounds", type=int, default=None)
    k.add_argument("--out")
    k.set_defaults(func=cmd_couple)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except exact.CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, GraphSpecError, DisconnectedGraphError, FamilyError,
            experiments.StartSpecError, window.WindowRangeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
