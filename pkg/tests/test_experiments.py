import csv
import json

import pytest

from pzf.experiments import (CSV_FIELDS, ExperimentConfig, StartSpecError, coupling_battery,
                             resolve_start, run_trials, simulate, summarize, summary_from_csv)
from pzf.graphs import build_graph, eccentricity


def test_resolve_start(graph):
    g = graph("grid:5x5")
    assert resolve_start(g, "origin") == [12]
    assert resolve_start(g, "vertex:3") == [3]
    assert len(resolve_start(g, "principal:1")) == 9
    assert resolve_start(g, "min-over-vertices") is None
    for bad in ("vertex:25", "vertex:x", "principal:9", "corner", "origin:1"):
        with pytest.raises(StartSpecError):
            resolve_start(g, bad)
    with pytest.raises(StartSpecError):
        resolve_start(graph("path:4"), "origin")


def test_csv_round_trip(tmp_path):
    out = tmp_path / "run.csv"
    cfg = ExperimentConfig("grid:9x9", "origin", 40, 3, out=str(out))
    summary, records = simulate(cfg)
    with out.open() as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0]) == CSV_FIELDS
    assert [int(r["pt"]) for r in rows] == [r.pt for r in records]
    again = summary_from_csv(out, build_graph("grid:9x9"))
    assert again.to_dict() == summary.to_dict()
    rounds = json.loads(out.with_suffix(".rounds.json").read_text())
    assert rounds["blue_counts"] == [r.blue_counts for r in records]
    assert json.loads(out.with_suffix(".summary.json").read_text())["summary"]["mean"] == summary.mean


def test_json_output(tmp_path):
    out = tmp_path / "run.json"
    simulate(ExperimentConfig("hypercube:5", "origin", 5, 1, out=str(out), format="json"))
    doc = json.loads(out.read_text())
    assert len(doc["records"]) == 5 and doc["summary"]["normalized"]["pt_over_dimension"] > 1


def test_worker_count_does_not_change_results():
    one = run_trials(ExperimentConfig("grid:11x11", "origin", 30, 9, workers=1))
    two = run_trials(ExperimentConfig("grid:11x11", "origin", 30, 9, workers=2))
    assert [r.to_json() for r in one] == [r.to_json() for r in two]


def test_min_over_vertices_never_worse_than_fixed_vertex():
    g = build_graph("grid:4x4")
    best = run_trials(ExperimentConfig("grid:4x4", "min-over-vertices", 60, 4))
    for v in (0, 5, 15):
        fixed = run_trials(ExperimentConfig("grid:4x4", f"vertex:{v}", 60, 4))
        assert all(b.pt <= f.pt for b, f in zip(best, fixed))
    assert all(0 <= r.extra["argmin_vertex"] < g.n for r in best)


def test_hypercube_lower_bound():
    recs = run_trials(ExperimentConfig("hypercube:10", "origin", 30, 2))
    assert all(r.pt >= 10 for r in recs)


def test_pt_at_least_eccentricity():
    g = build_graph("grid:15x15")
    recs = run_trials(ExperimentConfig("grid:15x15", "principal:1", 30, 6))
    assert all(r.pt >= eccentricity(g, resolve_start(g, "principal:1")) for r in recs)


def test_summary_statistics():
    s = summarize([3, 5, None, 4])
    assert (s.trials, s.finished, s.mean, s.min, s.max) == (4, 3, 4.0, 3, 5)
    assert s.quantiles["q50"] == 4.0
    assert summarize([None]).finished == 0


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("path:3", trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig("path:3", format="xml")


def test_coupling_battery_small():
    assert coupling_battery("grid:6x6", 50, 0).ok
