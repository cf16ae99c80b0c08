"""Signed graph states ``|G;S> = Z_S |G>`` and their exact rewrite rules.

Every operation is a pure function on :class:`SignedGraphState` and drops
global phases. Measurements that delete vertices compact the surviving labels
in increasing order (see :func:`pivotminor.graph.delete_vertices`).
"""

from __future__ import annotations

import heapq
import json
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .graph import (
    Graph,
    GraphError,
    delete_vertices,
    format_edge_list,
    local_complement,
    odd_neighborhood,
    parse_edge_list_block,
    pivot,
)


class NotExpressibleError(ValueError):
    """The requested measurements do not end in a signed graph state."""


@dataclass(frozen=True)
class SignedGraphState:
    graph: Graph
    sign: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "sign", frozenset(self.sign))
        for u in self.sign:
            self.graph.check_vertex(u)

    @property
    def n(self) -> int:
        return self.graph.n

    def __str__(self) -> str:
        return format_signed_state(self)


@dataclass(frozen=True)
class PauliWord:
    """``i^phase X_{x_support} Z_{z_support}``."""

    x_support: frozenset[int] = frozenset()
    z_support: frozenset[int] = frozenset()
    phase_exponent: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_support", frozenset(self.x_support))
        object.__setattr__(self, "z_support", frozenset(self.z_support))
        object.__setattr__(self, "phase_exponent", self.phase_exponent % 4)

    @classmethod
    def y(cls, u: int) -> PauliWord:
        """``Y_u = i X_u Z_u``."""
        return cls({u}, {u}, 1)


def _check(st: SignedGraphState, *us: int) -> None:
    for u in us:
        st.graph.check_vertex(u)


def _check_edge(st: SignedGraphState, u: int, v: int) -> None:
    _check(st, u, v)
    if not st.graph.has_edge(u, v):
        raise GraphError(f"{u}-{v} is not an edge")


# -- unitary moves ------------------------------------------------------------


def apply_pauli(st: SignedGraphState, p: PauliWord) -> SignedGraphState:
    """``S -> S ^ Z ^ Odd(X)``; X on u equals Z on N(u) against |G>."""
    _check(st, *p.x_support, *p.z_support)
    return SignedGraphState(st.graph, st.sign ^ p.z_support ^ odd_neighborhood(st.graph, p.x_support))


def apply_lc_op(st: SignedGraphState, u: int) -> SignedGraphState:
    """Action of ``sqrt(X)^dag_u sqrt(Z)_{N(u)}``: graph ``G*u``."""
    _check(st, u)
    sign = st.sign ^ st.graph.neighbors(u) if u in st.sign else st.sign
    return SignedGraphState(local_complement(st.graph, u), sign)


def hadamard_pair_sign(g: Graph, sign: frozenset[int], u: int, v: int) -> frozenset[int]:
    """Sign after ``H_u H_v``; the graph becomes ``G ^ uv``.

    With ``C = N(u) & N(v)``, ``A = N(u) - N(v) - v`` and
    ``B = N(v) - N(u) - u``, and ``S`` the part of the sign off ``{u, v}``:
    ``S -> S ^ C``, ``S+u -> S ^ B ^ {v}``, ``S+v -> S ^ A ^ {u}``,
    ``S+u+v -> S ^ (N(u) | N(v))``.
    """
    nu, nv = g.neighbors(u), g.neighbors(v)
    rest = sign - {u, v}
    c = nu & nv
    a = nu - nv - {v}
    b = nv - nu - {u}
    case = (u in sign, v in sign)
    if case == (False, False):
        return rest ^ c
    if case == (True, False):
        return rest ^ b ^ {v}
    if case == (False, True):
        return rest ^ a ^ {u}
    return rest ^ (nu | nv)


def apply_hadamard_pair(st: SignedGraphState, u: int, v: int) -> SignedGraphState:
    _check_edge(st, u, v)
    return SignedGraphState(pivot(st.graph, u, v), hadamard_pair_sign(st.graph, st.sign, u, v))


# -- measurements -------------------------------------------------------------


def measure_z(st: SignedGraphState, u: int, s: int) -> SignedGraphState:
    """``sqrt2 <s|_u |G;S>``: delete u, add ``N(u)`` to the sign when ``s = 1``.

    Both outcomes occur with probability 1/2, isolated u included.
    """
    _check(st, u)
    sign = st.sign - {u}
    if s:
        sign ^= st.graph.neighbors(u)
    g, relabel = delete_vertices(st.graph, [u])
    return SignedGraphState(g, frozenset(relabel[w] for w in sign))


def x_pair_sign(g: Graph, sign: frozenset[int], u: int, v: int, s: int, r: int) -> frozenset[int]:
    """Sign (in the labels of ``g``) after X-measuring ``u`` (outcome s) and ``v`` (outcome r)."""
    nu = g.neighbors(u) - {v}
    nv = g.neighbors(v) - {u}
    out = (sign - {u, v}) ^ (nu & nv)
    if r ^ (v in sign):
        out ^= nu
    if s ^ (u in sign):
        out ^= nv
    return out


def measure_x_pair(st: SignedGraphState, u: int, v: int, r: int, s: int) -> SignedGraphState:
    """X-measure the adjacent pair u, v; ``s`` is u's outcome, ``r`` is v's.

    The graph becomes ``(G ^ uv) - u - v``.
    """
    _check_edge(st, u, v)
    sign = x_pair_sign(st.graph, st.sign, u, v, s, r)
    g, relabel = delete_vertices(pivot(st.graph, u, v), [u, v])
    return SignedGraphState(g, frozenset(relabel[w] for w in sign))


def measure_x_isolated(st: SignedGraphState, u: int) -> tuple[int, SignedGraphState]:
    """X-measure an isolated vertex; its outcome is forced to ``[u in S]``."""
    _check(st, u)
    if st.graph.rows[u]:
        raise NotExpressibleError(
            f"vertex {u} has neighbours; a lone X-measurement leaves the graph-state family"
        )
    g, relabel = delete_vertices(st.graph, [u])
    return int(u in st.sign), SignedGraphState(g, frozenset(relabel[w] for w in st.sign - {u}))


# -- outcome sources ----------------------------------------------------------


class OutcomeSource:
    """Supplies the classical outcome of each measured vertex."""

    def bit(self, vertex: int) -> int:
        raise NotImplementedError


class ZeroOutcomes(OutcomeSource):
    def bit(self, vertex: int) -> int:
        return 0

    def __repr__(self) -> str:
        return "zero"


class ForcedOutcomes(OutcomeSource):
    """Bits consumed in measurement order, or looked up per vertex from a mapping."""

    def __init__(self, bits: str | Sequence[int] | Mapping[int, int]):
        if isinstance(bits, Mapping):
            self._map = {int(k): int(b) & 1 for k, b in bits.items()}
            self._seq = None
        else:
            if isinstance(bits, str):
                if set(bits) - {"0", "1"}:
                    raise ValueError(f"forced outcomes must be a 0/1 string, got {bits!r}")
                bits = [int(c) for c in bits]
            self._map = None
            self._seq = list(bits)
            self._pos = 0

    def bit(self, vertex: int) -> int:
        if self._map is not None:
            if vertex not in self._map:
                raise ValueError(f"no forced outcome for vertex {vertex}")
            return self._map[vertex]
        if self._pos >= len(self._seq):
            raise ValueError(f"forced outcome string exhausted after {self._pos} measurements")
        b = self._seq[self._pos]
        self._pos += 1
        return b

    def __repr__(self) -> str:
        return "forced"


class RandomOutcomes(OutcomeSource):
    """Fair coin per vertex, a splitmix64 hash of ``(seed, vertex)``.

    Keying on the vertex makes the outcome record independent of the order in
    which measurements are performed.
    """

    def __init__(self, seed: int):
        self.seed = seed & _MASK64

    def bit(self, vertex: int) -> int:
        return _splitmix64(self.seed ^ _splitmix64(vertex & _MASK64)) >> 63

    def __repr__(self) -> str:
        return f"random({self.seed})"


_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def outcome_source(mode: str | OutcomeSource | None, seed: int = 0) -> OutcomeSource:
    """Parse ``zero``, ``random`` or ``forced:<bits>``."""
    if isinstance(mode, OutcomeSource):
        return mode
    if mode is None or mode == "zero":
        return ZeroOutcomes()
    if mode == "random":
        return RandomOutcomes(seed)
    if mode.startswith("forced:"):
        return ForcedOutcomes(mode[len("forced:"):])
    raise ValueError(f"unknown outcome mode {mode!r}; use zero, random or forced:<bits>")


# -- replay -------------------------------------------------------------------

STRATEGIES = ("lowest", "highest", "random")


@dataclass
class ReplayResult:
    """Residual state, the measurement schedule and the label bookkeeping.

    ``schedule`` uses the labels of the input state. ``label_map`` sends each
    surviving input label to its label in ``state``.
    """

    state: SignedGraphState
    schedule: list[dict] = field(default_factory=list)
    label_map: dict[int, int] = field(default_factory=dict)

    def schedule_json(self) -> str:
        return json.dumps(self.schedule)

    def witness(self) -> dict:
        """Pivot-minor witness: the pivots, then every measured vertex deleted."""
        pivots = [e["vertices"] for e in self.schedule if e["op"] == "Xpair"]
        deleted = [v for e in self.schedule for v in e["vertices"]]
        return {"pivots": pivots, "deletions": sorted(deleted)}


class _Workspace:
    """Mutable sparse copy of a signed graph state keyed by original labels."""

    def __init__(self, st: SignedGraphState):
        self.adj = {u: set(nb) for u, nb in enumerate(st.graph.adjacency_lists)}
        self.sign = set(st.sign)

    def measure_z(self, u: int, s: int) -> None:
        nb = self.adj.pop(u)
        for w in nb:
            self.adj[w].discard(u)
        self.sign.discard(u)
        if s:
            self.sign ^= nb

    def measure_x_pair(self, u: int, v: int, s: int, r: int) -> list[tuple[int, int]]:
        """Pivot-and-delete; returns the edges created among survivors."""
        nu = self.adj[u] - {v}
        nv = self.adj[v] - {u}
        c = nu & nv
        a = nu - c
        b = nv - c
        in_u, in_v = u in self.sign, v in self.sign
        self.sign -= {u, v}
        self.sign ^= c
        if r ^ in_v:
            self.sign ^= nu
        if s ^ in_u:
            self.sign ^= nv
        for x in (u, v):
            for w in self.adj.pop(x):
                if w in self.adj:
                    self.adj[w].discard(x)
        created = []
        for p, q in ((a, b), (a, c), (b, c)):
            for x in p:
                ax = self.adj[x]
                for y in q:
                    if y in ax:
                        ax.discard(y)
                        self.adj[y].discard(x)
                    else:
                        ax.add(y)
                        self.adj[y].add(x)
                        created.append((x, y) if x < y else (y, x))
        return created

    def measure_x_isolated(self, u: int) -> int:
        if self.adj[u]:
            raise NotExpressibleError(
                f"X-measured vertex {u} is still adjacent to {sorted(self.adj[u])} "
                "once no X-measured pair remains"
            )
        del self.adj[u]
        b = int(u in self.sign)
        self.sign.discard(u)
        return b

    def freeze(self) -> tuple[SignedGraphState, dict[int, int]]:
        keep = sorted(self.adj)
        new = {u: i for i, u in enumerate(keep)}
        edges = [(new[u], new[w]) for u in keep for w in self.adj[u] if u < w]
        g = Graph.from_edges(len(keep), edges)
        return SignedGraphState(g, frozenset(new[u] for u in self.sign)), new


class _EdgeQueue:
    """X-X edges awaiting a pair measurement, served by strategy."""

    def __init__(self, strategy: str, rng: random.Random | None):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
        self.strategy = strategy
        self.rng = rng or random.Random(0)
        self.heap: list[tuple[int, int]] = []
        self.pool: set[tuple[int, int]] = set()

    def push(self, e: tuple[int, int]) -> None:
        if self.strategy == "random":
            self.pool.add(e)
        elif self.strategy == "lowest":
            heapq.heappush(self.heap, e)
        else:
            heapq.heappush(self.heap, (-e[0], -e[1]))

    def pop_valid(self, ws: _Workspace) -> tuple[int, int] | None:
        if self.strategy == "random":
            live = sorted(e for e in self.pool if e[0] in ws.adj and e[1] in ws.adj[e[0]])
            self.pool = set(live)
            if not live:
                return None
            e = live[self.rng.randrange(len(live))]
            self.pool.discard(e)
            return e
        while self.heap:
            e = heapq.heappop(self.heap)
            if self.strategy == "highest":
                e = (-e[0], -e[1])
            if e[0] in ws.adj and e[1] in ws.adj[e[0]]:
                return e
        return None


def replay_plan(
    st: SignedGraphState,
    x_set: Iterable[int],
    z_set: Iterable[int],
    outcomes: OutcomeSource | str | None = None,
    strategy: str = "lowest",
    rng: random.Random | None = None,
) -> ReplayResult:
    """Z-measure ``z_set``, then X-measure ``x_set`` by adjacent pairs, then singly.

    Pairs are chosen greedily among the X-X edges present at each step (lowest
    labelled edge first by default). Any X vertex left with a neighbour once no
    X-X edge remains makes the plan inexpressible.
    """
    source = outcome_source(outcomes)
    xs, zs = set(x_set), set(z_set)
    for u in xs | zs:
        st.graph.check_vertex(u)
    if xs & zs:
        raise ValueError(f"x_set and z_set overlap on {sorted(xs & zs)}")
    ws = _Workspace(st)
    schedule: list[dict] = []
    for u in sorted(zs):
        s = source.bit(u)
        ws.measure_z(u, s)
        schedule.append({"op": "Z", "vertices": [u], "outcomes": [s]})
    queue = _EdgeQueue(strategy, rng)
    for u in sorted(xs):
        for w in ws.adj[u]:
            if u < w and w in xs:
                queue.push((u, w))
    while (e := queue.pop_valid(ws)) is not None:
        u, v = e
        s, r = source.bit(u), source.bit(v)
        for x, y in ws.measure_x_pair(u, v, s, r):
            if x in xs and y in xs:
                queue.push((x, y))
        schedule.append({"op": "Xpair", "vertices": [u, v], "outcomes": [s, r]})
    for u in sorted(xs):
        if u in ws.adj:
            b = ws.measure_x_isolated(u)
            schedule.append({"op": "Xiso", "vertices": [u], "outcomes": [b]})
    state, label_map = ws.freeze()
    return ReplayResult(state, schedule, label_map)


def apply_schedule(st: SignedGraphState, schedule: Sequence[Mapping]) -> tuple[SignedGraphState, dict[int, int]]:
    """Re-run a recorded schedule with the immutable single-step operations.

    Returns the residual state and the surviving-label map, for cross-checking
    :func:`replay_plan`.
    """
    labels = list(range(st.n))
    for k, step in enumerate(schedule):
        op, vs, outs = step["op"], list(step["vertices"]), list(step["outcomes"])
        try:
            pos = [labels.index(v) for v in vs]
        except ValueError:
            raise NotExpressibleError(f"step {k}: vertex {vs} already removed") from None
        if op == "Z":
            st = measure_z(st, pos[0], outs[0])
        elif op == "Xpair":
            st = measure_x_pair(st, pos[0], pos[1], r=outs[1], s=outs[0])
        elif op == "Xiso":
            b, st = measure_x_isolated(st, pos[0])
            if b != outs[0]:
                raise NotExpressibleError(f"step {k}: forced outcome is {b}, schedule says {outs[0]}")
        else:
            raise ValueError(f"step {k}: unknown op {op!r}")
        for v in sorted(vs, reverse=True):
            labels.remove(v)
    return st, {u: i for i, u in enumerate(labels)}


# -- text form ----------------------------------------------------------------


def format_signed_state(st: SignedGraphState) -> str:
    return format_edge_list(st.graph) + "S:" + "".join(f" {u}" for u in sorted(st.sign)) + "\n"


def parse_signed_state(text: str) -> SignedGraphState:
    """Edge-list block followed by a line ``S: u1 u2 ...`` (the line is optional)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphError("empty signed-state text")
    g, rest = parse_edge_list_block(lines)
    sign: list[int] = []
    if rest:
        head = rest[0].strip()
        if not head.startswith("S:") or len(rest) > 1:
            raise GraphError(f"expected a single 'S:' line after the edges, got {rest!r}")
        try:
            sign = [int(t) for t in head[2:].split()]
        except ValueError:
            raise GraphError(f"bad sign line {head!r}") from None
        if len(set(sign)) != len(sign):
            raise GraphError("repeated vertex in sign line")
    return SignedGraphState(g, frozenset(sign))
