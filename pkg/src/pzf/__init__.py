"""Probabilistic zero forcing on graphs, exact expected propagation times, and
the d-window chain behind the grid speed bound."""
from ._backend import BACKEND
from .engine import BlueSet, TrialRecord, coupled_run, force_probability, run, run_deterministic_zf, step
from .exact import expected_pt, min_expected_pt, pt_distribution, round_transition
from .graphs import Graph, build_graph, eccentricity, hypercube_level, origin, principal_square
from .window import WindowConfig, build_matrix, frontier_probs, sample_chain, stationary, transition_row

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BlueSet", "Graph", "TrialRecord", "WindowConfig", "build_graph", "build_matrix",
    "coupled_run", "eccentricity", "expected_pt", "force_probability", "frontier_probs",
    "hypercube_level", "min_expected_pt", "origin", "principal_square", "pt_distribution",
    "round_transition", "run", "run_deterministic_zf", "sample_chain", "stationary", "step",
    "transition_row",
]
