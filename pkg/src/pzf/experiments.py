"""Monte Carlo campaigns: start resolution, parallel trials, summaries and output files."""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import engine
from ._random import derive_seed
from .graphs import Graph, build_graph, origin, principal_square

CSV_FIELDS = ("trial_index", "seed", "pt", "rounds_to_half", "final_round_count")
MIN_OVER_VERTICES = "min-over-vertices"
QUANTILES = (5, 25, 50, 75, 95)


class StartSpecError(ValueError):
    """Start spec is malformed or not valid for the graph family."""


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("PZF_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass
class ExperimentConfig:
    graph: str
    start: str = "origin"
    trials: int = 100
    seed: int = 0
    max_rounds: int | None = None
    workers: int = field(default_factory=default_workers)
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")


def resolve_start(g: Graph, spec: str) -> list[int] | None:
    """Vertices of the start set, or None for the min-over-vertices mode."""
    if spec == MIN_OVER_VERTICES:
        return None
    kind, _, arg = spec.partition(":")
    try:
        if kind == "vertex":
            v = int(arg)
            if not 0 <= v < g.n:
                raise StartSpecError(f"vertex {v} not in {g.spec}")
            return [v]
        if kind == "origin" and not arg:
            return [origin(g)]
        if kind == "principal":
            return sorted(principal_square(g, int(arg)))
    except StartSpecError:
        raise
    except ValueError as exc:
        raise StartSpecError(str(exc)) from None
    raise StartSpecError(f"unknown start spec {spec!r}")


def run_seed(trial_seed: int, start: list[int]) -> int:
    """Seed of one run: singleton starts are keyed by their vertex."""
    return derive_seed(trial_seed, start[0]) if len(start) == 1 else trial_seed


@lru_cache(maxsize=8)
def _graph(spec: str) -> Graph:
    return build_graph(spec)


def run_trial(g: Graph, start_spec: str, start: list[int] | None, master: int, index: int,
              max_rounds: int | None) -> engine.TrialRecord:
    trial_seed = derive_seed(master, index)
    if start is not None:
        rec = engine.run(g, start, run_seed(trial_seed, start), max_rounds, label=start_spec)
        rec.seed = trial_seed
        return rec
    best = None
    for v in range(g.n):
        rec = engine.run(g, [v], run_seed(trial_seed, [v]), max_rounds)
        key = rec.pt if rec.pt is not None else math.inf
        if best is None or key < best[0]:
            best = (key, v, rec)
    _, v, rec = best
    rec.seed = trial_seed
    rec.start = MIN_OVER_VERTICES
    rec.extra["argmin_vertex"] = v
    return rec


def _chunk(args: tuple) -> list[engine.TrialRecord]:
    spec, start_spec, master, lo, hi, max_rounds = args
    g = _graph(spec)
    start = resolve_start(g, start_spec)
    return [run_trial(g, start_spec, start, master, i, max_rounds) for i in range(lo, hi)]


def run_trials(cfg: ExperimentConfig) -> list[engine.TrialRecord]:
    """All trials ordered by trial index; results do not depend on ``workers``."""
    g = _graph(cfg.graph)
    resolve_start(g, cfg.start)
    if cfg.workers <= 1 or cfg.trials < 2:
        return _chunk((cfg.graph, cfg.start, cfg.seed, 0, cfg.trials, cfg.max_rounds))
    nchunks = min(cfg.trials, cfg.workers * 4)
    bounds = np.linspace(0, cfg.trials, nchunks + 1).astype(int)
    jobs = [(cfg.graph, cfg.start, cfg.seed, int(lo), int(hi), cfg.max_rounds)
            for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return [rec for part in pool.map(_chunk, jobs) for rec in part]


@dataclass
class SummaryStats:
    trials: int
    finished: int
    mean: float
    std: float
    min: int | None
    max: int | None
    quantiles: dict[str, float]
    se: float
    normalized: dict[str, float]

    def to_dict(self) -> dict:
        return asdict(self)


def normalizer(g: Graph) -> tuple[str, float] | None:
    if g.family == "hypercube":
        return "pt_over_dimension", float(g.params[0])
    if g.family in ("grid", "torus"):
        m, n = g.params
        return "pt_over_half_perimeter", (m + n) / 2
    return None


def summarize(pts: list[int | None], g: Graph | None = None) -> SummaryStats:
    done = np.array([p for p in pts if p is not None], dtype=np.float64)
    if done.size == 0:
        return SummaryStats(len(pts), 0, math.nan, math.nan, None, None, {}, math.nan, {})
    std = float(done.std(ddof=1)) if done.size > 1 else 0.0
    q = {f"q{p}": float(np.percentile(done, p)) for p in QUANTILES}
    norm = {}
    if g is not None and (scale := normalizer(g)) is not None:
        norm[scale[0]] = float(done.mean() / scale[1])
    return SummaryStats(len(pts), int(done.size), float(done.mean()), std, int(done.min()),
                        int(done.max()), q, std / math.sqrt(done.size), norm)


def csv_rows(records: list[engine.TrialRecord]) -> list[dict]:
    return [{"trial_index": i, "seed": r.seed, "pt": "" if r.pt is None else r.pt,
             "rounds_to_half": "" if r.rounds_to_half is None else r.rounds_to_half,
             "final_round_count": r.final_round_count} for i, r in enumerate(records)]


def write_outputs(cfg: ExperimentConfig, records: list[engine.TrialRecord], summary: SummaryStats) -> list[Path]:
    """Write raw trials, per-round counts and the summary next to ``cfg.out``."""
    base = Path(cfg.out)
    base.parent.mkdir(parents=True, exist_ok=True)
    meta = {"graph": cfg.graph, "start": cfg.start, "trials": cfg.trials, "seed": cfg.seed,
            "max_rounds": cfg.max_rounds}
    if cfg.format == "json":
        doc = {**meta, "summary": summary.to_dict(),
               "records": [json.loads(r.to_json()) for r in records]}
        base.write_text(json.dumps(doc, indent=1))
        return [base]
    with base.open("w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        wr.writeheader()
        wr.writerows(csv_rows(records))
    rounds = base.with_suffix(".rounds.json")
    rounds.write_text(json.dumps({**meta, "blue_counts": [r.blue_counts for r in records]}))
    summ = base.with_suffix(".summary.json")
    summ.write_text(json.dumps({**meta, "summary": summary.to_dict()}, indent=1))
    return [base, rounds, summ]


def summary_from_csv(path: str | Path, g: Graph | None = None) -> SummaryStats:
    with Path(path).open() as fh:
        pts = [int(row["pt"]) if row["pt"] else None for row in csv.DictReader(fh)]
    return summarize(pts, g)


def simulate(cfg: ExperimentConfig) -> tuple[SummaryStats, list[engine.TrialRecord]]:
    records = run_trials(cfg)
    summary = summarize([r.pt for r in records], _graph(cfg.graph))
    if cfg.out:
        write_outputs(cfg, records, summary)
    return summary, records


def random_nested_starts(g: Graph, rng: np.random.Generator) -> tuple[list[int], list[int]]:
    """A random nonempty set and a random superset of it."""
    k1 = int(rng.integers(1, max(2, g.n // 8) + 1))
    s1 = rng.choice(g.n, size=k1, replace=False)
    rest = np.setdiff1d(np.arange(g.n), s1)
    extra = rng.choice(rest, size=int(rng.integers(0, min(len(rest), g.n // 4) + 1)), replace=False)
    return sorted(s1.tolist()), sorted(set(s1.tolist()) | set(extra.tolist()))


def coupling_battery(spec: str, trials: int, seed: int, max_rounds: int | None = None) -> engine.CouplingReport:
    g = _graph(spec)
    rng = np.random.default_rng(seed)
    total = engine.CouplingReport()
    for i in range(trials):
        s1, s2 = random_nested_starts(g, rng)
        total += engine.coupling_check(g, s1, s2, derive_seed(seed, i), max_rounds)
    return total
