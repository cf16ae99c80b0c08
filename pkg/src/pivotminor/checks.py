"""Oracle-versus-rewrite sweeps shared by the CLI self-test and the test suite."""

from __future__ import annotations

import math
import random
from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .graph import Graph, all_graphs, random_graph
from .oracle import (
    EQUIV_TOL,
    Gate,
    StateVector,
    apply_gate,
    build_graph_state,
    measure_angle,
    overlap,
    project,
)
from .signed import (
    PauliWord,
    SignedGraphState,
    apply_hadamard_pair,
    apply_lc_op,
    apply_pauli,
    measure_x_isolated,
    measure_x_pair,
    measure_z,
)

RULES = ("pauli", "lc", "hadamard_pair", "measure_z", "measure_x_pair", "measure_x_isolated")


@dataclass
class Tally:
    passed: Counter = field(default_factory=Counter)
    failed: Counter = field(default_factory=Counter)
    examples: list[str] = field(default_factory=list)

    def record(self, rule: str, ok: bool, what: str) -> None:
        if ok:
            self.passed[rule] += 1
        else:
            self.failed[rule] += 1
            if len(self.examples) < 10:
                self.examples.append(f"{rule}: {what}")

    def merge(self, other: Tally) -> None:
        self.passed.update(other.passed)
        self.failed.update(other.failed)
        self.examples.extend(other.examples[: max(0, 10 - len(self.examples))])

    @property
    def ok(self) -> bool:
        return not sum(self.failed.values())

    def summary(self) -> str:
        rules = sorted(set(self.passed) | set(self.failed))
        return ", ".join(f"{r} {self.passed[r]}/{self.passed[r] + self.failed[r]}" for r in rules)


def subsets(vertices) -> Iterator[frozenset[int]]:
    vs = list(vertices)
    for k in range(len(vs) + 1):
        for c in combinations(vs, k):
            yield frozenset(c)


def _vec(st: SignedGraphState) -> StateVector:
    return build_graph_state(st.graph, st.sign)


def _same(psi: StateVector, phi: StateVector, scale: float = 1.0) -> bool:
    """``|<psi|phi>| * scale`` within tolerance of 1 (labels by position)."""
    a = StateVector(tuple(range(psi.n)), psi.amplitudes)
    b = StateVector(tuple(range(phi.n)), phi.amplitudes)
    return abs(abs(overlap(a, b)) * scale - 1) < EQUIV_TOL


def _pauli_vector(psi: StateVector, p: PauliWord) -> StateVector:
    for u in sorted(p.z_support):
        psi = apply_gate(psi, Gate("Z", (u,)))
    for u in sorted(p.x_support):
        psi = apply_gate(psi, Gate("X", (u,)))
    return psi


def check_instance(g: Graph, sign: frozenset[int], rng: random.Random, tally: Tally) -> None:
    """Compare every rewrite rule with the oracle on one signed graph state."""
    st = SignedGraphState(g, sign)
    psi = _vec(st)
    tag = f"edges={g.edges()} S={sorted(sign)}"
    words = [PauliWord({u}) for u in g.vertices] + [PauliWord(z_support={u}) for u in g.vertices]
    words += [PauliWord.y(u) for u in g.vertices]
    coin = lambda: {u for u in g.vertices if rng.random() < 0.5}  # noqa: E731
    words.append(PauliWord(coin(), coin()))
    for p in words:
        ok = _same(_pauli_vector(psi, p), _vec(apply_pauli(st, p)))
        tally.record("pauli", ok, f"{tag} X={sorted(p.x_support)} Z={sorted(p.z_support)}")
    for u in g.vertices:
        phi = apply_gate(psi, Gate("SXdg", (u,)))
        for w in sorted(g.neighbors(u)):
            phi = apply_gate(phi, Gate("SZ", (w,)))
        tally.record("lc", _same(phi, _vec(apply_lc_op(st, u))), f"{tag} u={u}")
        for s in (0, 1):
            proj = project(psi, u, 0.0, s)
            ok = _same(proj, _vec(measure_z(st, u, s)), math.sqrt(2))
            tally.record("measure_z", ok, f"{tag} u={u} s={s}")
        if not g.rows[u]:
            b, rest = measure_x_isolated(st, u)
            br = measure_angle(psi, u, math.pi / 2, b)
            ok = abs(br.probability - 1) < 1e-12 and _same(br.state, _vec(rest))
            tally.record("measure_x_isolated", ok, f"{tag} u={u}")
    for u, v in g.edges():
        for a, b in ((u, v), (v, u)):
            phi = apply_gate(apply_gate(psi, Gate("H", (a,))), Gate("H", (b,)))
            tally.record("hadamard_pair", _same(phi, _vec(apply_hadamard_pair(st, a, b))), f"{tag} uv={a}{b}")
            for s in (0, 1):
                for r in (0, 1):
                    proj = project(project(psi, a, math.pi / 2, s), b, math.pi / 2, r)
                    ok = _same(proj, _vec(measure_x_pair(st, a, b, r=r, s=s)), 2.0)
                    tally.record("measure_x_pair", ok, f"{tag} u={a} v={b} s={s} r={r}")


def sweep_exhaustive(max_n: int, seed: int = 0) -> Tally:
    """Every labelled graph with ``n <= max_n`` and every sign set."""
    rng = random.Random(seed)
    tally = Tally()
    for n in range(1, max_n + 1):
        for g in all_graphs(n):
            for sign in subsets(g.vertices):
                check_instance(g, sign, rng, tally)
    return tally


def sweep_random(count: int, max_n: int, seed: int = 0, min_n: int = 1) -> Tally:
    rng = random.Random(seed)
    tally = Tally()
    for _ in range(count):
        n = rng.randint(min_n, max_n)
        g = random_graph(n, rng, rng.choice((0.2, 0.4, 0.6)))
        sign = frozenset(u for u in g.vertices if rng.random() < 0.5)
        check_instance(g, sign, rng, tally)
    return tally


def gram_deviation(g: Graph) -> float:
    """``max |Gram - I|`` over the basis ``{|G;S>}_S``."""
    vecs = np.array([build_graph_state(g, s).amplitudes for s in subsets(g.vertices)])
    gram = vecs.conj() @ vecs.T
    return float(np.max(np.abs(gram - np.eye(len(vecs)))))


def distinct_pairs_violations(max_n: int) -> tuple[int, int]:
    """Count equivalent pairs among distinct ``(G, S)`` for each ``n <= max_n``.

    Returns ``(pairs checked, violations)``.
    """
    checked = bad = 0
    for n in range(1, max_n + 1):
        states = [(g, s) for g in all_graphs(n) for s in subsets(g.vertices)]
        vecs = np.array([build_graph_state(g, s).amplitudes for g, s in states])
        gram = np.abs(vecs.conj() @ vecs.T)
        k = len(states)
        iu = np.triu_indices(k, 1)
        checked += len(iu[0])
        bad += int(np.sum(gram[iu] > 1 - EQUIV_TOL))
    return checked, bad
