from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pivotminor.graph import local_complement, path_graph
from pivotminor.oracle import (
    CZ,
    H,
    X,
    Gate,
    StateVector,
    apply_gate,
    basis_state,
    entangling_map,
    equal_up_to_phase,
    p_gate,
    project,
)
from pivotminor.mbqc import (
    LogicalGate,
    OpenGraph,
    Pattern,
    PatternError,
    PauliFrame,
    adapt_angle,
    circuit_pattern,
    compose,
    compose_patterns,
    cz_pattern,
    gadget_matrix,
    implements,
    logical_unitary,
    normalize_angle,
    rotation_angle,
    rotation_pattern,
    simulate_pattern,
    wire_pattern,
)
from pivotminor.signed import ForcedOutcomes, RandomOutcomes

ALPHAS = (0.0, math.pi / 6, math.pi / 4, math.pi / 2, 0.7, 2.3)


def branches(p: Pattern):
    measured = [v for v, _ in p.plan]
    for bits in itertools.product((0, 1), repeat=len(measured)):
        yield dict(zip(measured, bits))


def same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    k = np.argmax(abs(b))
    if abs(a.flat[k]) < 1e-12:
        return False
    phase = a.flat[k] / b.flat[k]
    return abs(abs(phase) - 1) < tol and np.allclose(a, phase * b, atol=tol)


def test_compose_examples():
    a = OpenGraph((1, 2), {(1, 2)}, (1,), (2,))
    b = OpenGraph((2, 3), {(2, 3)}, (2,), (3,))
    ab = compose(a, b)
    assert ab.edges == {(1, 2), (2, 3)} and ab.inputs == (1,) and ab.outputs == (3,)
    e = OpenGraph((1, 2), {(1, 2)}, (1, 2), (1, 2))
    assert compose(e, e).edges == frozenset()
    with pytest.raises(PatternError):
        compose(a, a)


def test_h_wire_composed_twice_is_identity():
    w = wire_pattern(2)
    ww = compose_patterns(w, w.relabel({1: 2, 2: 3}))
    assert ww.open_graph.edges == {(1, 2), (2, 3)}
    for oc in branches(ww):
        assert implements(ww, np.eye(2), oc)


def test_wire_pattern_parity_and_byproducts():
    for r in (0, 1):
        raw = gadget_matrix(wire_pattern(2), {1: r}, corrected=False)
        target = np.linalg.matrix_power(X, r) @ H
        for col in range(2):
            assert same_up_to_phase(raw[:, col], target[:, col])
    for n in range(2, 8):
        target = H if n % 2 == 0 else np.eye(2)
        for oc in branches(wire_pattern(n)):
            assert implements(wire_pattern(n), target, oc)


def test_cz_pattern_matrix():
    m = gadget_matrix(cz_pattern(), {})
    assert np.allclose(m, CZ, atol=1e-12)
    for x1, x2 in itertools.product((0, 1), repeat=2):
        assert abs(m[2 * x1 + x2, 2 * x1 + x2] - (-1) ** (x1 * x2)) < 1e-12


@pytest.mark.parametrize("alpha", ALPHAS)
def test_rotation_pattern_all_branches(alpha):
    p = rotation_pattern(alpha)
    for oc in branches(p):
        assert implements(p, p_gate(alpha), oc)


def test_rotation_special_angles():
    assert np.allclose(p_gate(math.pi / 2), H)
    assert np.allclose(p_gate(0), X)
    for oc in branches(rotation_pattern(math.pi / 2)):
        assert implements(rotation_pattern(math.pi / 2), gadget_matrix(wire_pattern(2), {1: 0}), oc)


@settings(max_examples=25, deadline=None)
@given(st.floats(-2 * math.pi, 2 * math.pi), st.integers(0, 15))
def test_rotation_gadget_is_lc_of_a_path(alpha, branch):
    """Measuring the path state in the bases pulled back through the local
    complementation at the centre reproduces every branch of the gadget."""
    p = rotation_pattern(alpha)
    og = p.open_graph
    path = path_graph(5)
    assert og.graph == local_complement(path, 2)
    rng = np.random.default_rng(branch)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi_in = StateVector((0,), v / np.linalg.norm(v))
    direct = entangling_map(og.graph, [0], psi_in)
    pulled = entangling_map(path, [0], psi_in)
    # U = sqrt(X)^dag on the centre, sqrt(Z) on its path neighbours
    for gate in (Gate("SXdg", (2,)), Gate("SZ", (1,)), Gate("SZ", (3,))):
        pulled = apply_gate(pulled, gate)
    bits = [(branch >> k) & 1 for k in range(4)]
    for (u, angle), s in zip(p.plan, bits):
        direct = project(direct, og.position[u], angle, s)
        pulled = project(pulled, og.position[u], angle, s)
    assert abs(direct.norm() - pulled.norm()) < 1e-9
    assert equal_up_to_phase(direct.normalized(), pulled.normalized())


def test_adapt_angle_examples():
    assert adapt_angle(PauliFrame(), 1, 0.3) == (0.3, 0)
    assert adapt_angle(PauliFrame(z={1: 1}), 1, math.pi / 2) == (pytest.approx(math.pi / 2), 1)
    assert adapt_angle(PauliFrame(x={1: 1}), 1, 0.0) == (0.0, 1)
    assert normalize_angle(2 * math.pi + 0.25) == (pytest.approx(0.25), 0)


def test_simulate_examples():
    sim = simulate_pattern(wire_pattern(2), basis_state([1], [0]), ForcedOutcomes({1: 0}))
    assert np.allclose(sim.state.amplitudes, H @ [1, 0])
    assert [t["vertex"] for t in sim.transcript] == [1]
    sim = simulate_pattern(cz_pattern(), basis_state([1, 2], [1, 1]), "zero")
    assert np.allclose(sim.state.amplitudes, [0, 0, 0, -1])


def test_composed_circuit_h_cz_p_random_outcomes():
    alpha = 0.9
    gates = [LogicalGate("P", (0,), alpha), LogicalGate("CZ", (0, 1)), LogicalGate("H", (0,))]
    p = circuit_pattern(2, gates)
    target = np.kron(H, np.eye(2)) @ CZ @ np.kron(p_gate(alpha), np.eye(2))
    assert np.allclose(logical_unitary(2, gates), target)
    for seed in range(100):
        src = RandomOutcomes(seed)
        assert implements(p, target, {v: src.bit(v) for v, _ in p.plan})


def test_pattern_validation():
    og = OpenGraph((1, 2), {(1, 2)}, (1,), (2,))
    with pytest.raises(PatternError):
        Pattern(og, ((1, 0.0), (2, 0.0)), {1: {2}, 2: set()})  # measures an output
    with pytest.raises(PatternError):
        Pattern(og, ((1, math.pi / 2),), {})  # missing correction set
    with pytest.raises(PatternError):
        Pattern(og, ((1, math.pi / 2),), {1: {1}})  # set contains the input
    with pytest.raises(PatternError):
        OpenGraph((1, 1), set(), (1,), (1,))


def test_pattern_json_round_trip():
    p = rotation_pattern(0.7)
    q = Pattern.from_json(p.to_json())
    assert q.open_graph == p.open_graph and q.plan == p.plan and q.corrections == p.corrections
    assert q.plan[2] == (3, pytest.approx(rotation_angle(0.7)))
    with pytest.raises(PatternError):
        Pattern.from_json({"vertices": [1]})
