from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import graphs
from pivotminor.graph import Graph, all_graphs, complete_graph, local_complement, path_graph
from pivotminor.oracle import (
    CZ,
    H,
    MAX_QUBITS,
    SWAP,
    X,
    Z,
    Gate,
    OracleError,
    StateVector,
    ZeroBranchError,
    apply_gate,
    apply_gates,
    apply_matrix,
    basis_state,
    basis_vector,
    build_graph_state,
    decode_graph_state,
    entangling_map,
    entangling_map_sum,
    equal_up_to_phase,
    gates_unitary,
    graph_state_by_gates,
    measure_angle,
    observable,
    overlap,
    p_gate,
    plus_state,
    project,
)

S2 = 1 / math.sqrt(2)


def random_state(rng: np.random.Generator, labels) -> StateVector:
    v = rng.normal(size=2 ** len(labels)) + 1j * rng.normal(size=2 ** len(labels))
    return StateVector(tuple(labels), v / np.linalg.norm(v))


def test_graph_state_examples():
    assert np.allclose(build_graph_state(Graph.empty(1)).amplitudes, [S2, S2])
    assert np.allclose(build_graph_state(path_graph(2)).amplitudes, [0.5, 0.5, 0.5, -0.5])


def test_label_zero_is_most_significant():
    psi = basis_state([0, 1, 2], [1, 0, 0])
    assert psi.amplitudes[4] == 1


def test_builders_agree_and_stabilizers_hold():
    for n in range(1, 5):
        for g in all_graphs(n):
            for sign in [frozenset(), frozenset({0}), frozenset(range(n))]:
                psi = build_graph_state(g, sign)
                assert abs(psi.norm() - 1) < 1e-12
                assert equal_up_to_phase(psi, graph_state_by_gates(g, sign))
                for u in g.vertices:
                    phi = apply_matrix(psi, X, [u])
                    for w in g.neighbors(u):
                        phi = apply_matrix(phi, Z, [w])
                    eig = -1 if u in sign else 1
                    assert np.allclose(phi.amplitudes, eig * psi.amplitudes, atol=1e-12)


def test_gates_unitary_and_match_matrices():
    for kind in ("I", "H", "X", "Y", "Z", "SX", "SXdg", "SZ", "SZdg"):
        m = Gate(kind, (0,)).matrix()
        assert np.allclose(m.conj().T @ m, np.eye(2))
        assert np.allclose(gates_unitary(1, [Gate(kind, (0,))]), m)
    assert np.allclose(gates_unitary(2, [Gate("CZ", (0, 1))]), CZ)
    assert np.allclose(gates_unitary(2, [Gate("SWAP", (0, 1))]), SWAP)
    p = p_gate(0.7)
    assert np.allclose(p.conj().T @ p, np.eye(2))
    assert np.allclose(p_gate(math.pi / 2), H)
    assert np.allclose(p_gate(0), X)


def test_gate_validation():
    with pytest.raises(OracleError):
        Gate("Q", (0,))
    with pytest.raises(OracleError):
        Gate("CZ", (0, 0))
    with pytest.raises(OracleError):
        Gate("P", (0,))
    with pytest.raises(OracleError):
        plus_state(range(MAX_QUBITS + 1))


def test_h_squared_and_swap_identity():
    rng = np.random.default_rng(5)
    psi = random_state(rng, [0, 1])
    hh = apply_gates(psi, [Gate("H", (0,)), Gate("H", (0,))])
    assert np.allclose(hh.amplitudes, psi.amplitudes)
    h = lambda w: Gate("H", (w,))  # noqa: E731
    cz = Gate("CZ", (0, 1))
    seq = [h(0), cz, h(0), h(1), cz, h(0), h(1), cz, h(0)]
    assert np.allclose(apply_gates(psi, seq).amplitudes, apply_gate(psi, Gate("SWAP", (0, 1))).amplitudes)


def test_local_complement_by_local_unitaries():
    for n in range(1, 5):
        for g in all_graphs(n):
            psi = build_graph_state(g)
            for u in g.vertices:
                phi = apply_gate(psi, Gate("SXdg", (u,)))
                for w in g.neighbors(u):
                    phi = apply_gate(phi, Gate("SZ", (w,)))
                assert equal_up_to_phase(phi, build_graph_state(local_complement(g, u)))


def test_measurement_bases():
    for s in (0, 1):
        assert np.allclose(basis_vector(0, s), [1, 0] if s == 0 else [0, -1])
        assert np.allclose(abs(basis_vector(math.pi / 2, s)), [S2, S2])
    rng = np.random.default_rng(0)
    for alpha in rng.uniform(0, 2 * math.pi, 10):
        b0, b1 = basis_vector(alpha, 0), basis_vector(alpha, 1)
        diff = np.outer(b0, b0.conj()) - np.outer(b1, b1.conj())
        assert np.allclose(diff, observable(alpha))
        assert np.allclose(diff, math.cos(alpha) * Z + math.sin(alpha) * X)


def test_measure_angle_probabilities_and_zero_branch():
    psi = basis_state([0], [0])
    assert measure_angle(psi, 0, 0.0, 0).probability == pytest.approx(1)
    zero = measure_angle(psi, 0, 0.0, 1)
    assert zero.is_zero
    with pytest.raises(ZeroBranchError):
        zero.state
    plus = plus_state([0, 1])
    br = measure_angle(plus, 1, math.pi / 2, 0)
    assert br.probability == pytest.approx(1)
    assert br.state.labels == (0,)
    assert project(plus, 1, math.pi / 2, 1).norm() < 1e-12


def test_equality_examples():
    rng = np.random.default_rng(2)
    psi = random_state(rng, [0, 1, 2])
    assert equal_up_to_phase(psi, StateVector(psi.labels, np.exp(0.3j) * psi.amplitudes))
    assert not equal_up_to_phase(build_graph_state(path_graph(2)), build_graph_state(path_graph(2), {0}))
    p3 = path_graph(3)
    assert equal_up_to_phase(build_graph_state(local_complement(p3, 1)), build_graph_state(complete_graph(3)))


def test_overlap_reorders_labels():
    rng = np.random.default_rng(3)
    psi = random_state(rng, ["a", "b", "c"])
    assert abs(overlap(psi, psi.reorder(["c", "a", "b"])) - 1) < 1e-12


def test_entangling_map_examples():
    for n in range(1, 5):
        for g in all_graphs(n):
            assert equal_up_to_phase(entangling_map(g, [], build_graph_state(Graph.empty(0))), build_graph_state(g))
            inputs = list(range(min(2, n)))
            plus = plus_state(inputs)
            assert abs(overlap(build_graph_state(g), entangling_map(g, inputs, plus)) - 1) < 1e-12
            for x in range(2 ** len(inputs)):
                bits = [(x >> (len(inputs) - 1 - i)) & 1 for i in range(len(inputs))]
                direct = entangling_map(g, inputs, basis_state(inputs, bits))
                summed = entangling_map_sum(g, inputs, dict(zip(inputs, bits)))
                assert np.allclose(direct.amplitudes, summed.amplitudes)


@settings(max_examples=60)
@given(graphs(max_n=6), st.data())
def test_decode_round_trip(g, data):
    sign = data.draw(st.frozensets(st.integers(0, g.n - 1)))
    phase = data.draw(st.floats(0, 2 * math.pi))
    psi = build_graph_state(g, sign)
    psi = StateVector(psi.labels, np.exp(1j * phase) * psi.amplitudes)
    assert decode_graph_state(psi) == (g, sign)


def test_decode_rejects_non_graph_states():
    assert decode_graph_state(basis_state([0, 1], [0, 0])) is None
    t = apply_gate(plus_state([0]), Gate("SZ", (0,)))
    assert decode_graph_state(t) is None
