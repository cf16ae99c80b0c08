"""Open graphs, measurement patterns and Pauli-frame simulation.

Vertices of an open graph are arbitrary ``int`` names; the dense
:class:`~pivotminor.graph.Graph` view indexes them by position in
``vertices``. A pattern measures every non-output vertex once, in plan order,
at an ``(X, Z)``-plane angle (``0`` is Z, ``pi/2`` is X).

Byproducts are tracked with correction sets. Each measured vertex ``u`` owns a
set ``g(u)`` of non-input vertices; the operator ``K = X_g Z_Odd(g)`` fixes
the entangled state, so the outcome-1 branch equals the outcome-0 branch with
``K`` applied off ``u``. Outcome 1 therefore pushes ``X_{g-u} Z_{Odd(g)-u}``
into the frame. For this to be sound, ``g - u`` and ``Odd(g) - u`` must avoid
already-measured vertices and ``K`` restricted to ``u`` must swap the two basis
vectors at ``u``'s angle (Z for an X-measurement, X for a Z-measurement, Y for
any angle).
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import Graph
from .oracle import (
    MAX_QUBITS,
    Gate,
    OracleError,
    StateVector,
    X,
    Z,
    ZeroBranchError,
    apply_matrix,
    basis_state,
    entangling_map,
    equal_up_to_phase,
    gates_unitary,
    measure_angle,
)
from .signed import ForcedOutcomes, OutcomeSource, outcome_source

X_ANGLE = math.pi / 2
Z_ANGLE = 0.0
ANGLE_TOL = 1e-12


class PatternError(ValueError):
    """Malformed open graph, pattern or correction sets."""


# -- open graphs --------------------------------------------------------------


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class OpenGraph:
    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "edges", frozenset(_edge(u, v) for u, v in self.edges))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise PatternError("repeated vertex name")
        for u, v in self.edges:
            if u == v or u not in vs or v not in vs:
                raise PatternError(f"bad edge {u}-{v}")
        for name, group in (("input", self.inputs), ("output", self.outputs)):
            if len(set(group)) != len(group) or not set(group) <= vs:
                raise PatternError(f"{name} vertices {group} must be distinct vertices of the graph")

    @classmethod
    def from_graph(cls, g: Graph, inputs: Sequence[int], outputs: Sequence[int]) -> OpenGraph:
        return cls(tuple(g.vertices), frozenset(g.edges()), tuple(inputs), tuple(outputs))

    @property
    def graph(self) -> Graph:
        pos = self.position
        return Graph.from_edges(len(self.vertices), ((pos[u], pos[v]) for u, v in self.edges))

    @property
    def position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def neighbors(self, u: int) -> set[int]:
        return {b if a == u else a for a, b in self.edges if u in (a, b)}

    def odd(self, b: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for u in b:
            out ^= self.neighbors(u)
        return out

    def relabel(self, mapping: Mapping[int, int]) -> OpenGraph:
        m = lambda v: mapping.get(v, v)  # noqa: E731
        return OpenGraph(
            tuple(m(v) for v in self.vertices),
            frozenset((m(u), m(v)) for u, v in self.edges),
            tuple(m(v) for v in self.inputs),
            tuple(m(v) for v in self.outputs),
        )


def compose(a: OpenGraph, b: OpenGraph) -> OpenGraph:
    """Glue ``b`` after ``a`` along ``outputs(a) = inputs(b)``; edges add mod 2."""
    shared = set(a.vertices) & set(b.vertices)
    if not (shared == set(a.outputs) == set(b.inputs)):
        raise PatternError(
            f"composition needs V(a) & V(b) = outputs(a) = inputs(b); got {sorted(shared)}, "
            f"{sorted(a.outputs)}, {sorted(b.inputs)}"
        )
    vertices = a.vertices + tuple(v for v in b.vertices if v not in shared)
    return OpenGraph(vertices, a.edges ^ b.edges, a.inputs, b.outputs)


def tensor(a: OpenGraph, b: OpenGraph) -> OpenGraph:
    """Side-by-side union of open graphs with disjoint vertex names."""
    if set(a.vertices) & set(b.vertices):
        raise PatternError("tensor factors must have disjoint vertices")
    return OpenGraph(a.vertices + b.vertices, a.edges | b.edges, a.inputs + b.inputs, a.outputs + b.outputs)


def identity_open_graph(vertices: Sequence[int]) -> OpenGraph:
    return OpenGraph(tuple(vertices), frozenset(), tuple(vertices), tuple(vertices))


# -- patterns -----------------------------------------------------------------


@dataclass(frozen=True)
class Pattern:
    open_graph: OpenGraph
    plan: tuple[tuple[int, float], ...]
    corrections: Mapping[int, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "plan", tuple((int(v), float(a)) for v, a in self.plan))
        object.__setattr__(
            self, "corrections", {int(k): frozenset(g) for k, g in self.corrections.items()}
        )
        og = self.open_graph
        measured = [v for v, _ in self.plan]
        if len(set(measured)) != len(measured):
            raise PatternError("a vertex is measured twice")
        expected = set(og.vertices) - set(og.outputs)
        if set(measured) != expected:
            raise PatternError(
                f"plan must measure exactly the non-outputs {sorted(expected)}, got {sorted(measured)}"
            )
        problems = correction_problems(self)
        if problems:
            raise PatternError("; ".join(problems))

    @property
    def angles(self) -> dict[int, float]:
        return dict(self.plan)

    def relabel(self, mapping: Mapping[int, int]) -> Pattern:
        m = lambda v: mapping.get(v, v)  # noqa: E731
        return Pattern(
            self.open_graph.relabel(mapping),
            tuple((m(v), a) for v, a in self.plan),
            {m(k): frozenset(m(x) for x in g) for k, g in self.corrections.items()},
        )

    def to_json(self) -> dict:
        og = self.open_graph
        return {
            "vertices": list(og.vertices),
            "edges": sorted([list(e) for e in og.edges]),
            "inputs": list(og.inputs),
            "outputs": list(og.outputs),
            "plan": [{"vertex": v, "angle_radians": a, "order": k} for k, (v, a) in enumerate(self.plan)],
            "corrections": {str(k): sorted(g) for k, g in sorted(self.corrections.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data: Mapping) -> Pattern:
        try:
            og = OpenGraph(
                tuple(data["vertices"]),
                frozenset(tuple(e) for e in data["edges"]),
                tuple(data["inputs"]),
                tuple(data["outputs"]),
            )
            plan = sorted(data["plan"], key=lambda e: e.get("order", 0))
            steps = tuple((e["vertex"], e["angle_radians"]) for e in plan)
            corr = {int(k): frozenset(g) for k, g in data.get("corrections", {}).items()}
        except (KeyError, TypeError) as exc:
            raise PatternError(f"malformed pattern JSON: {exc}") from None
        return cls(og, steps, corr)


def _angle_class(a: float) -> str:
    r = math.remainder(a, math.pi)
    if abs(r) < 1e-9:
        return "Z"
    if abs(abs(r) - math.pi / 2) < 1e-9:
        return "X"
    return "general"


def correction_problems(p: Pattern) -> list[str]:
    """Soundness conditions of the correction sets (empty list when sound)."""
    og = p.open_graph
    inputs = set(og.inputs)
    order = {v: k for k, (v, _) in enumerate(p.plan)}
    out = []
    for k, (u, a) in enumerate(p.plan):
        if u not in p.corrections:
            out.append(f"no correction set for measured vertex {u}")
            continue
        g = p.corrections[u]
        if not g <= set(og.vertices):
            out.append(f"correction set of {u} leaves the graph")
            continue
        if g & inputs:
            out.append(f"correction set of {u} contains inputs {sorted(g & inputs)}")
        odd = og.odd(g)
        for w in (g | odd) - {u}:
            if w in order and order[w] < k:
                out.append(f"correction of {u} touches {w}, measured earlier")
        on_u = (u in g, u in odd)
        kind = _angle_class(a)
        ok = on_u == (True, True) or (kind == "X" and on_u == (False, True)) or (kind == "Z" and on_u == (True, False))
        if not ok:
            out.append(f"correction of {u} does not flip its {kind} measurement")
    return out


def compose_patterns(a: Pattern, b: Pattern) -> Pattern:
    """Sequential composition; plans concatenate and correction sets carry over."""
    return Pattern(compose(a.open_graph, b.open_graph), a.plan + b.plan, {**a.corrections, **b.corrections})


def tensor_patterns(a: Pattern, b: Pattern) -> Pattern:
    return Pattern(tensor(a.open_graph, b.open_graph), a.plan + b.plan, {**a.corrections, **b.corrections})


def identity_pattern(vertices: Sequence[int]) -> Pattern:
    return Pattern(identity_open_graph(vertices), (), {})


def wire_pattern(n: int) -> Pattern:
    """Path ``1 - 2 - ... - n``, input 1, output n, vertices 1..n-1 X-measured.

    Implements H when ``n`` is even and the identity when ``n`` is odd.
    """
    if n < 2:
        raise PatternError("a wire needs at least two vertices")
    og = OpenGraph(tuple(range(1, n + 1)), frozenset((k, k + 1) for k in range(1, n)), (1,), (n,))
    return Pattern(og, tuple((k, X_ANGLE) for k in range(1, n)), {k: frozenset({k + 1}) for k in range(1, n)})


def cz_pattern() -> Pattern:
    """Single edge with both ends input and output; implements CZ."""
    return Pattern(OpenGraph((1, 2), frozenset({(1, 2)}), (1, 2), (1, 2)), (), {})


def rotation_angle(alpha: float) -> float:
    """Centre-vertex plan angle realising ``P(alpha)`` in :func:`rotation_pattern`."""
    return math.pi / 2 - alpha


def rotation_pattern(alpha: float) -> Pattern:
    """Five vertices ``1 - 2 - {3, 4} - 5`` with triangle ``2, 3, 4``.

    Input 1, output 5. The centre 3 is measured at ``pi/2 - alpha`` (observable
    ``cos(alpha) X + sin(alpha) Z``); its neighbours 2, 4 and the input are
    X-measured. The graph is the local complement at the centre of the path
    ``1 - 2 - 3 - 4 - 5``.
    """
    og = OpenGraph((1, 2, 3, 4, 5), frozenset({(1, 2), (2, 3), (3, 4), (2, 4), (4, 5)}), (1,), (5,))
    plan = ((1, X_ANGLE), (2, X_ANGLE), (3, rotation_angle(alpha)), (4, X_ANGLE))
    corr = {1: {2}, 2: {3}, 3: {3, 4}, 4: {5}}
    return Pattern(og, plan, corr)


# -- Pauli frame --------------------------------------------------------------


@dataclass
class PauliFrame:
    """Pending ``X^a Z^b`` per qubit: physical state = frame * ideal state."""

    x: dict[int, int] = field(default_factory=dict)
    z: dict[int, int] = field(default_factory=dict)

    def get(self, u: int) -> tuple[int, int]:
        return self.x.get(u, 0), self.z.get(u, 0)

    def add(self, xs: Iterable[int] = (), zs: Iterable[int] = ()) -> None:
        for u in xs:
            self.x[u] = self.x.get(u, 0) ^ 1
        for u in zs:
            self.z[u] = self.z.get(u, 0) ^ 1

    def discard(self, u: int) -> None:
        self.x.pop(u, None)
        self.z.pop(u, None)

    def restricted(self, us: Iterable[int]) -> PauliFrame:
        us = set(us)
        return PauliFrame({u: b for u, b in self.x.items() if u in us and b},
                          {u: b for u, b in self.z.items() if u in us and b})

    def to_json(self) -> dict:
        return {str(u): list(self.get(u)) for u in sorted(set(self.x) | set(self.z)) if any(self.get(u))}


def normalize_angle(alpha: float) -> tuple[float, int]:
    """Map into ``[0, pi)``; shifting by ``pi`` swaps the basis vectors."""
    a = math.fmod(alpha, 2 * math.pi)
    if a < 0:
        a += 2 * math.pi
    if a >= math.pi - ANGLE_TOL:
        a -= math.pi
        flip = 1
    else:
        flip = 0
    if abs(a) < ANGLE_TOL:
        a = 0.0
    return a, flip


def adapt_angle(frame: PauliFrame, u: int, alpha: float) -> tuple[float, int]:
    """Angle to use on the physical qubit and whether its outcome is flipped.

    ``X |s^a> = +-|s^(pi-a)>`` and ``Z |s^a> = +-|s^(-a)>``; the result is
    normalized into ``[0, pi)``.
    """
    a, b = frame.get(u)
    if b:
        alpha = -alpha
    if a:
        alpha = math.pi - alpha
    return normalize_angle(alpha)


@dataclass
class Simulation:
    state: StateVector
    frame: PauliFrame
    transcript: list[dict]

    def corrected(self) -> StateVector:
        """Output state with the recorded frame undone."""
        psi = self.state
        for u in psi.labels:
            a, b = self.frame.get(u)
            m = np.eye(2, dtype=complex)
            if a:
                m = X @ m
            if b:
                m = Z @ m
            if a or b:
                psi = apply_matrix(psi, m, [u])
        return psi


def simulate_pattern(
    p: Pattern,
    psi_in: StateVector,
    outcomes: OutcomeSource | str | None = None,
) -> Simulation:
    """Run ``p`` on ``psi_in`` (labelled by the input vertices).

    Outcomes are drawn per vertex from ``outcomes``; the transcript records the
    adapted angle, the physical outcome and the logical outcome after the flip.
    The returned state lives on the output vertices in ``outputs`` order, with
    the frame restricted to them still pending.
    """
    og = p.open_graph
    if len(og.vertices) > MAX_QUBITS:
        raise OracleError(f"pattern has {len(og.vertices)} qubits, limit {MAX_QUBITS}")
    source = outcome_source(outcomes)
    pos = og.position
    inputs_dense = [pos[v] for v in og.inputs]
    relabelled_in = StateVector(tuple(pos[v] for v in psi_in.labels), psi_in.amplitudes)
    if sorted(psi_in.labels) != sorted(og.inputs):
        raise PatternError(f"input state labels {psi_in.labels} differ from inputs {og.inputs}")
    dense = entangling_map(og.graph, inputs_dense, relabelled_in)
    psi = StateVector(tuple(og.vertices), dense.amplitudes)
    frame = PauliFrame()
    transcript = []
    for u, alpha in p.plan:
        adapted, flip = adapt_angle(frame, u, alpha)
        s = source.bit(u)
        branch = measure_angle(psi, u, adapted, s)
        if branch.is_zero:
            raise ZeroBranchError(f"vertex {u}: outcome {s} at angle {adapted} has probability 0")
        psi = branch.state
        logical = s ^ flip
        frame.discard(u)
        if logical:
            g = p.corrections[u]
            frame.add(g - {u}, og.odd(g) - {u})
        transcript.append(
            {"vertex": u, "angle": alpha, "adapted_angle": adapted, "outcome": s, "logical_outcome": logical}
        )
    psi = psi.reorder(list(og.outputs))
    return Simulation(psi, frame.restricted(og.outputs), transcript)


def transcript_json(sim: Simulation) -> str:
    return json.dumps({"transcript": sim.transcript, "frame": sim.frame.to_json()}, indent=2)


# -- circuits of gadgets ------------------------------------------------------


@dataclass(frozen=True)
class LogicalGate:
    """``H`` and ``P`` on one wire, ``CZ`` on two."""

    kind: str
    wires: tuple[int, ...]
    angle: float | None = None


def gadget(gate: LogicalGate) -> Pattern:
    if gate.kind == "H":
        return wire_pattern(2)
    if gate.kind == "P":
        return rotation_pattern(gate.angle)
    if gate.kind == "CZ":
        return cz_pattern()
    raise PatternError(f"no gadget for {gate.kind!r}")


def circuit_pattern(n_wires: int, gates: Sequence[LogicalGate]) -> Pattern:
    """Compose gadgets into one pattern; wire ``k`` starts at vertex ``k``.

    Idle wires are tensored with identity open graphs so each step composes
    along all current wire vertices.
    """
    current = list(range(n_wires))
    result = identity_pattern(current)
    fresh = n_wires
    for gate in gates:
        if not gate.wires or any(not 0 <= w < n_wires for w in gate.wires):
            raise PatternError(f"gate {gate} addresses a missing wire")
        gp = gadget(gate)
        og = gp.open_graph
        mapping = {}
        for w, name in zip(gate.wires, og.inputs):
            mapping[name] = current[w]
        for v in og.vertices:
            if v not in mapping:
                mapping[v] = fresh
                fresh += 1
        gp = gp.relabel(mapping)
        step = gp
        for w in range(n_wires):
            if w not in gate.wires:
                step = tensor_patterns(step, identity_pattern([current[w]]))
        # the step's outputs follow gate wires first; restore wire order
        out_by_wire = dict(zip(gate.wires, gp.open_graph.outputs))
        for w in range(n_wires):
            out_by_wire.setdefault(w, current[w])
        og2 = replace(step.open_graph, outputs=tuple(out_by_wire[w] for w in range(n_wires)))
        step = Pattern(og2, step.plan, step.corrections)
        result = compose_patterns(result, step)
        current = [out_by_wire[w] for w in range(n_wires)]
    return result


def logical_unitary(n_wires: int, gates: Sequence[LogicalGate]) -> np.ndarray:
    """Direct matrix product of a gadget circuit (wire 0 is the MSB)."""
    ops = []
    for gate in gates:
        if gate.kind == "CZ":
            ops.append(Gate("CZ", gate.wires))
        elif gate.kind == "H":
            ops.append(Gate("H", gate.wires))
        elif gate.kind == "P":
            ops.append(Gate("P", gate.wires, gate.angle))
        else:
            raise PatternError(f"unknown logical gate {gate.kind!r}")
    return gates_unitary(n_wires, ops)


def gadget_matrix(p: Pattern, outcomes: Mapping[int, int], corrected: bool = True) -> np.ndarray:
    """Extract the map on the outputs for fixed per-vertex outcomes.

    Columns are images of the computational basis inputs (first input = MSB).
    Each column is a normalized output state, so columns share no common phase;
    compare whole maps with :func:`implements`.
    """
    k = len(p.open_graph.inputs)
    cols = []
    for x in range(2**k):
        bits = [(x >> (k - 1 - i)) & 1 for i in range(k)]
        sim = simulate_pattern(p, basis_state(p.open_graph.inputs, bits), ForcedOutcomes(outcomes))
        psi = sim.corrected() if corrected else sim.state
        cols.append(psi.amplitudes)
    return np.array(cols).T


def implements(p: Pattern, target: np.ndarray, outcomes: Mapping[int, int], tol: float = 1e-9) -> bool:
    """True iff the corrected pattern maps inputs like ``target`` up to phase.

    Compared on three fixed random inputs; generic superpositions pin the
    relative phases between columns that basis inputs cannot see.
    """
    k = len(p.open_graph.inputs)
    rng = np.random.default_rng(1234)
    for _ in range(3):
        v = rng.normal(size=2**k) + 1j * rng.normal(size=2**k)
        v /= np.linalg.norm(v)
        psi = StateVector(p.open_graph.inputs, v)
        sim = simulate_pattern(p, psi, ForcedOutcomes(outcomes))
        want = StateVector(p.open_graph.outputs, target @ v)
        if not equal_up_to_phase(sim.corrected(), want, tol):
            return False
    return True


__all__ = [
    "LogicalGate",
    "OpenGraph",
    "Pattern",
    "PatternError",
    "PauliFrame",
    "Simulation",
    "adapt_angle",
    "circuit_pattern",
    "compose",
    "compose_patterns",
    "cz_pattern",
    "gadget_matrix",
    "identity_pattern",
    "implements",
    "logical_unitary",
    "normalize_angle",
    "rotation_angle",
    "rotation_pattern",
    "simulate_pattern",
    "tensor",
    "tensor_patterns",
    "wire_pattern",
]
