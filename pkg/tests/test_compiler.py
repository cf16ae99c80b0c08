from __future__ import annotations

import json
import random

import numpy as np
import pytest

from pivotminor.compiler import (
    DEPTH_CONSTANT,
    Circuit,
    CompileError,
    GridCompilation,
    compile_graph,
    depth_bound,
    layering,
    layout,
    planarize,
    prep_circuit,
    verify,
)
from pivotminor.graph import Graph, all_graphs, complete_graph, path_graph, random_graph
from pivotminor.oracle import Gate, apply_gates, build_graph_state, equal_up_to_phase, gates_unitary, plus_state
from pivotminor.search import check_witness, witness_from_schedule
from pivotminor.signed import RandomOutcomes


def test_prep_circuit_examples():
    assert prep_circuit(complete_graph(3)).count("CZ") == 3
    assert prep_circuit(Graph.empty(4)).size == 0
    for n in range(1, 5):
        for g in all_graphs(n):
            psi = apply_gates(plus_state(range(n)), prep_circuit(g).gates)
            assert equal_up_to_phase(psi, build_graph_state(g))


def test_planarize_adjacent_unchanged():
    c = Circuit(3, (Gate("CZ", (0, 1)), Gate("H", (2,)), Gate("CZ", (1, 2))))
    assert planarize(c) == c


def test_planarize_routes_and_preserves_unitary():
    c = Circuit(3, (Gate("CZ", (0, 2)),))
    routed = planarize(c, expand_swaps=False)
    assert [g.kind for g in routed.gates] == ["SWAP", "CZ", "SWAP"]
    full = planarize(c)
    assert full.is_planar() and full.count("SWAP") == 0
    assert np.allclose(gates_unitary(3, full.gates), gates_unitary(3, c.gates))


def test_planarize_gate_count_per_original_gate():
    for n in range(2, 7):
        c = prep_circuit(complete_graph(n))
        full = planarize(c)
        assert full.is_planar()
        # each CZ costs at most 2(n-2) SWAPs of 9 gates plus itself
        assert full.size <= c.size * (18 * (n - 2) + 1)
        if n <= 5:
            assert np.allclose(gates_unitary(n, full.gates), gates_unitary(n, c.gates))


def test_layering_spacing_rule():
    c = Circuit(4, (Gate("CZ", (0, 1)), Gate("CZ", (2, 3))))
    layers = layering(c)
    assert layers == [{0: "CZ-upper", 1: "CZ-lower"}, {2: "CZ-upper", 3: "CZ-lower"}]
    with pytest.raises(CompileError):
        layering(Circuit(3, (Gate("CZ", (0, 2)),)))


def test_layout_examples():
    empty = layout(Circuit(1, ()))
    assert (empty.rows, empty.cols) == (4, 4)
    assert empty.tiles == {(0, 0): "Id"}
    assert verify(empty, Graph.empty(1)).ok
    h = layout(Circuit(1, (Gate("H", (0,)),)))
    assert h.tiles == {(0, 0): "H"}
    # H|+> = |0> is not a graph state, so the plan cannot end in one
    res = verify(h, Graph.empty(1))
    assert not res.ok and "still adjacent" in res.message
    hh = layout(Circuit(1, (Gate("H", (0,)), Gate("H", (0,)))))
    assert hh.tiles == {(0, 0): "H", (0, 1): "H"}
    assert verify(hh, Graph.empty(1)).ok
    cz = layout(Circuit(2, (Gate("CZ", (0, 1)),)))
    assert verify(cz, path_graph(2)).ok


def test_compile_examples_and_partition():
    for g in (complete_graph(3), path_graph(2), Graph.empty(3)):
        comp = compile_graph(g)
        res = verify(comp, g)
        assert res.ok and res.graph == g and res.sign == frozenset()
        everything = comp.x_set | comp.z_set | set(comp.outputs)
        assert len(everything) == comp.vertex_count == len(comp.x_set) + len(comp.z_set) + len(comp.outputs)


def test_compile_random_graphs():
    rng = random.Random(11)
    for _ in range(15):
        g = random_graph(rng.randint(1, 5), rng, rng.choice((0.3, 0.6)))
        comp = compile_graph(g)
        assert verify(comp, g).ok
        assert (comp.rows, comp.cols) == (4 * g.n, 4 * comp.depth)
        assert comp.depth <= depth_bound(g.n)


def test_random_outcomes_keep_graph():
    g = complete_graph(3)
    comp = compile_graph(g)
    signs = set()
    for seed in range(20):
        res = verify(comp, g, RandomOutcomes(seed))
        assert res.ok and res.graph == g
        signs.add(res.sign)
    assert len(signs) > 1


def test_tampered_plan_rejected():
    g = complete_graph(3)
    comp = compile_graph(g)
    x = min(comp.x_set)
    bad = GridCompilation(comp.n, comp.depth, comp.tiles, comp.x_set - {x}, comp.z_set | {x}, comp.outputs, comp.schedule)
    res = verify(bad, g)
    assert not res.ok and res.message
    assert not verify(comp, path_graph(3)).ok


def test_json_round_trip():
    g = complete_graph(3)
    comp = compile_graph(g)
    back = GridCompilation.from_json(json.loads(comp.dumps()))
    assert back.x_set == comp.x_set and back.outputs == comp.outputs and back.tiles == comp.tiles
    assert verify(back, g).ok
    with pytest.raises(CompileError):
        GridCompilation.from_json({"rows": 5, "cols": 4, "outputs": [], "x_set": [], "z_set": []})
    with pytest.raises(CompileError):
        GridCompilation.from_json({"rows": 4})


def test_certificate_as_pivot_minor_witness():
    for g in (complete_graph(3), path_graph(3)):
        comp = compile_graph(g)
        w = witness_from_schedule(comp.schedule, comp.outputs)
        assert check_witness(g, comp.grid, w)


def test_depth_constant():
    assert depth_bound(4) == DEPTH_CONSTANT * 64
    for n in range(1, 6):
        assert compile_graph(complete_graph(n)).depth <= depth_bound(n)
