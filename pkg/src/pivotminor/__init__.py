"""Signed graph states, pivot minors and (X, Z)-measurement compilation onto grids."""

from __future__ import annotations

from .canon import canonical_form, canonical_hash
from .compiler import GridCompilation, compile_graph, depth_bound, planarize, prep_circuit, verify
from .graph import Graph, GraphError, generate, local_complement, odd_neighborhood, pivot
from .mbqc import OpenGraph, Pattern, simulate_pattern
from .oracle import StateVector, build_graph_state, decode_graph_state, equal_up_to_phase
from .search import check_witness, is_pivot_minor, pivot_orbit
from .signed import (
    PauliWord,
    SignedGraphState,
    apply_hadamard_pair,
    apply_lc_op,
    apply_pauli,
    measure_x_isolated,
    measure_x_pair,
    measure_z,
    replay_plan,
)

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphError", "GridCompilation", "OpenGraph", "Pattern", "PauliWord", "SignedGraphState",
    "StateVector", "apply_hadamard_pair", "apply_lc_op", "apply_pauli", "build_graph_state",
    "canonical_form", "canonical_hash", "check_witness", "compile_graph", "decode_graph_state",
    "depth_bound", "equal_up_to_phase", "generate", "is_pivot_minor", "local_complement",
    "measure_x_isolated", "measure_x_pair", "measure_z", "odd_neighborhood", "pivot", "pivot_orbit",
    "planarize", "prep_circuit", "replay_plan", "simulate_pattern", "verify",
]
