"""Dense state-vector ground truth.

Amplitudes are a flat complex array of length ``2**n``; the first entry of
``labels`` is the most significant bit of the index. Measurement in the
``(X, Z)`` plane at angle ``alpha`` uses the basis

    |0^a> = cos(a/2)|0> + sin(a/2)|1>,   |1^a> = sin(a/2)|0> - cos(a/2)|1>

whose observable is ``cos(a) Z + sin(a) X``: ``a = 0`` is Z, ``a = pi/2`` is X.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .graph import Graph

MAX_QUBITS = 20
EQUIV_TOL = 1e-9
SELF_TOL = 1e-12


class OracleError(ValueError):
    """Bad labels, size limits or malformed gates."""


class ZeroBranchError(OracleError):
    """The post-state of a probability-zero measurement branch was requested."""


# -- states -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    labels: tuple
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise OracleError(f"duplicate qubit labels {self.labels}")
        if self.amplitudes.shape != (2 ** len(self.labels),):
            raise OracleError("amplitude array does not match label count")

    @property
    def n(self) -> int:
        return len(self.labels)

    def axis(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise OracleError(f"unknown qubit label {label!r}") from None

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        return StateVector(self.labels, self.amplitudes / self.norm())

    def reorder(self, labels: Sequence) -> StateVector:
        """Same state with qubits listed in the order ``labels``."""
        if sorted(map(repr, labels)) != sorted(map(repr, self.labels)):
            raise OracleError(f"label mismatch {labels} vs {self.labels}")
        axes = [self.axis(lab) for lab in labels]
        t = np.transpose(self.tensor(), axes)
        return StateVector(tuple(labels), t.reshape(-1).copy())

    def kron(self, other: StateVector) -> StateVector:
        return StateVector(self.labels + other.labels, np.kron(self.amplitudes, other.amplitudes))

    def dump(self, tol: float = 0.0) -> str:
        """Text dump, one ``index real imag`` line per amplitude above ``tol``."""
        return "\n".join(
            f"{i} {a.real:.17g} {a.imag:.17g}" for i, a in enumerate(self.amplitudes) if abs(a) > tol
        ) + "\n"


def _check_size(n: int) -> None:
    if n > MAX_QUBITS:
        raise OracleError(f"dense simulation limited to {MAX_QUBITS} qubits, got {n}")


def plus_state(labels: Sequence) -> StateVector:
    _check_size(len(labels))
    n = len(labels)
    return StateVector(tuple(labels), np.full(2**n, 2 ** (-n / 2), dtype=complex))


def basis_state(labels: Sequence, bits: Sequence[int]) -> StateVector:
    _check_size(len(labels))
    idx = 0
    for b in bits:
        idx = idx << 1 | (b & 1)
    amps = np.zeros(2 ** len(labels), dtype=complex)
    amps[idx] = 1.0
    return StateVector(tuple(labels), amps)


def _bit_columns(n: int) -> np.ndarray:
    """``cols[v][x]`` is bit ``v`` of basis index ``x`` (label 0 is the MSB)."""
    idx = np.arange(2**n)
    return np.array([(idx >> (n - 1 - v)) & 1 for v in range(n)], dtype=np.int64).reshape(n, 2**n)


def build_graph_state(g: Graph, sign: Iterable[int] = (), labels: Sequence | None = None) -> StateVector:
    """``Z_sign prod_{uv in E} CZ_uv |+>^n``; ``<0^n|G> = 2^(-n/2)``."""
    _check_size(g.n)
    n = g.n
    cols = _bit_columns(n)
    parity = np.zeros(2**n, dtype=np.int64)
    for u, v in g.edges():
        parity ^= cols[u] & cols[v]
    for u in set(sign):
        g.check_vertex(u)
        parity ^= cols[u]
    amps = (1 - 2 * parity) * 2 ** (-n / 2)
    return StateVector(tuple(labels) if labels is not None else tuple(range(n)), amps.astype(complex))


def graph_state_by_gates(g: Graph, sign: Iterable[int] = ()) -> StateVector:
    """Reference route: start from |+>^n and apply CZ and Z gates one by one."""
    psi = plus_state(range(g.n))
    for u, v in g.edges():
        psi = apply_gate(psi, Gate("CZ", (u, v)))
    for u in sorted(set(sign)):
        psi = apply_gate(psi, Gate("Z", (u,)))
    return psi


# -- gates --------------------------------------------------------------------

_S2 = 1 / np.sqrt(2)
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _S2


def sqrt_pauli(p: np.ndarray) -> np.ndarray:
    """``e^{i pi/4} (I - i P) / sqrt 2``."""
    return np.exp(1j * np.pi / 4) * (I2 - 1j * p) * _S2


def p_gate(alpha: float) -> np.ndarray:
    """The reflection ``cos(a/2) X + sin(a/2) Z``."""
    return np.cos(alpha / 2) * X + np.sin(alpha / 2) * Z


CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

ONE_QUBIT = {
    "I": I2,
    "H": H,
    "X": X,
    "Y": Y,
    "Z": Z,
    "SX": sqrt_pauli(X),
    "SXdg": sqrt_pauli(X).conj().T,
    "SZ": sqrt_pauli(Z),
    "SZdg": sqrt_pauli(Z).conj().T,
}
TWO_QUBIT = {"CZ": CZ, "SWAP": SWAP}
GATE_KINDS = tuple(ONE_QUBIT) + ("P",) + tuple(TWO_QUBIT)


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise OracleError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(self.targets) != arity:
            raise OracleError(f"{self.kind} acts on {arity} qubit(s), got {self.targets}")
        if arity == 2 and self.targets[0] == self.targets[1]:
            raise OracleError(f"{self.kind} needs two distinct qubits")
        if (self.kind == "P") != (self.angle is not None):
            raise OracleError("exactly the P gate carries an angle")

    def matrix(self) -> np.ndarray:
        if self.kind == "P":
            return p_gate(self.angle)
        return ONE_QUBIT.get(self.kind, TWO_QUBIT.get(self.kind))


def apply_matrix(psi: StateVector, m: np.ndarray, targets: Sequence) -> StateVector:
    """Apply a ``2^k x 2^k`` matrix to the listed qubits (first target = MSB)."""
    k = len(targets)
    axes = [psi.axis(t) for t in targets]
    t = np.tensordot(m.reshape((2,) * (2 * k)), psi.tensor(), axes=(list(range(k, 2 * k)), axes))
    t = np.moveaxis(t, list(range(k)), axes)
    return StateVector(psi.labels, t.reshape(-1))


def apply_gate(psi: StateVector, gate: Gate) -> StateVector:
    return apply_matrix(psi, gate.matrix(), gate.targets)


def apply_gates(psi: StateVector, gates: Iterable[Gate]) -> StateVector:
    for gate in gates:
        psi = apply_gate(psi, gate)
    return psi


def gates_unitary(n: int, gates: Iterable[Gate]) -> np.ndarray:
    """Full ``2^n x 2^n`` matrix of a gate list on labels ``0..n-1``."""
    cols = []
    gates = list(gates)
    for x in range(2**n):
        e = np.zeros(2**n, dtype=complex)
        e[x] = 1
        cols.append(apply_gates(StateVector(tuple(range(n)), e), gates).amplitudes)
    return np.array(cols).T


# -- measurement --------------------------------------------------------------


def basis_vector(alpha: float, s: int) -> np.ndarray:
    c, sn = np.cos(alpha / 2), np.sin(alpha / 2)
    return np.array([c, sn], dtype=complex) if s == 0 else np.array([sn, -c], dtype=complex)


def observable(alpha: float) -> np.ndarray:
    return np.cos(alpha) * Z + np.sin(alpha) * X


def project(psi: StateVector, u, alpha: float, s: int) -> StateVector:
    """Unnormalized ``<s^alpha|_u psi`` on the remaining qubits."""
    ax = psi.axis(u)
    bra = basis_vector(alpha, s).conj()
    t = np.tensordot(bra, psi.tensor(), axes=([0], [ax]))
    labels = psi.labels[:ax] + psi.labels[ax + 1:]
    return StateVector(labels, t.reshape(-1))


@dataclass(frozen=True, eq=False)
class Branch:
    probability: float
    _state: StateVector | None = field(repr=False)
    label: object = None
    outcome: int = 0

    @property
    def is_zero(self) -> bool:
        return self._state is None

    @property
    def state(self) -> StateVector:
        if self._state is None:
            raise ZeroBranchError(f"outcome {self.outcome} on qubit {self.label!r} has probability 0")
        return self._state


def measure_angle(psi: StateVector, u, alpha: float, s: int, tol: float = SELF_TOL) -> Branch:
    """Probability of outcome ``s`` and the renormalized post-state."""
    phi = project(psi, u, alpha, s)
    p = float(np.vdot(phi.amplitudes, phi.amplitudes).real)
    if p <= tol:
        return Branch(p, None, u, s)
    return Branch(p, StateVector(phi.labels, phi.amplitudes / np.sqrt(p)), u, s)


def overlap(psi: StateVector, phi: StateVector) -> complex:
    if tuple(psi.labels) != tuple(phi.labels):
        if sorted(map(repr, psi.labels)) != sorted(map(repr, phi.labels)):
            raise OracleError(f"label mismatch {psi.labels} vs {phi.labels}")
        phi = phi.reorder(psi.labels)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def equal_up_to_phase(psi: StateVector, phi: StateVector, tol: float = EQUIV_TOL) -> bool:
    """True iff ``|<psi|phi>| > 1 - tol`` (both states assumed normalized)."""
    return abs(overlap(psi, phi)) > 1 - tol


# -- open graphs --------------------------------------------------------------


def entangling_map(graph: Graph, inputs: Sequence[int], psi_in: StateVector) -> StateVector:
    """Adjoin non-input qubits in |+>, then apply CZ along every edge.

    ``psi_in`` is labelled by the input vertices; the result is labelled
    ``0..n-1`` in order.
    """
    _check_size(graph.n)
    if sorted(psi_in.labels) != sorted(inputs):
        raise OracleError(f"input state labels {psi_in.labels} differ from inputs {list(inputs)}")
    rest = [v for v in graph.vertices if v not in set(inputs)]
    psi = psi_in.kron(plus_state(rest)) if rest else psi_in
    psi = psi.reorder(list(graph.vertices))
    parity = np.zeros(2**graph.n, dtype=np.int64)
    cols = _bit_columns(graph.n)
    for u, v in graph.edges():
        parity ^= cols[u] & cols[v]
    return StateVector(psi.labels, psi.amplitudes * (1 - 2 * parity))


def entangling_map_sum(graph: Graph, inputs: Sequence[int], x: dict[int, int]) -> StateVector:
    """The basis-input form ``2^{-|I|/2} sum_{S <= I} (-1)^{x . 1_S} |G;S>``."""
    inputs = list(inputs)
    acc = np.zeros(2**graph.n, dtype=complex)
    for k in range(len(inputs) + 1):
        for s in combinations(inputs, k):
            sgn = (-1) ** sum(x[u] for u in s)
            acc += sgn * build_graph_state(graph, s).amplitudes
    return StateVector(tuple(range(graph.n)), acc * 2 ** (-len(inputs) / 2))


def decode_graph_state(psi: StateVector, tol: float = EQUIV_TOL) -> tuple[Graph, frozenset[int]] | None:
    """Return ``(G, S)`` with ``psi = |G;S>`` up to phase, or ``None``.

    Labels are positions ``0..n-1``. Signs come from single-bit amplitudes and
    edges from two-bit amplitudes relative to ``<0^n|psi>``; the candidate is
    then compared with ``psi`` in full.
    """
    n = psi.n
    a0 = psi.amplitudes[0]
    if abs(abs(a0) - 2 ** (-n / 2)) > 1e-6:
        return None
    rel = psi.amplitudes / a0
    bit = lambda v: 1 << (n - 1 - v)  # noqa: E731
    sign = frozenset(v for v in range(n) if rel[bit(v)].real < 0)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            parity = rel[bit(u) | bit(v)].real * (-1) ** ((u in sign) + (v in sign))
            if parity < 0:
                edges.append((u, v))
    g = Graph.from_edges(n, edges)
    if not equal_up_to_phase(StateVector(psi.labels, build_graph_state(g, sign).amplitudes), psi, tol):
        return None
    return g, sign
