"""Pivot orbits and pivot-minor tests for small graphs.

``g`` is a pivot minor of ``h`` when some sequence of pivots turns ``h`` into
a graph that has ``g`` as an induced subgraph; the deletions come last.
"""

from __future__ import annotations

import json
from collections import deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .canon import MAX_CANON_N, canonical_hash
from .graph import Graph, GraphError, delete_vertices, pivot

MAX_SEARCH_N = MAX_CANON_N
DEFAULT_MAX_SIZE = 200_000


class SearchLimitError(ValueError):
    """Input too large for exhaustive search."""


@dataclass
class OrbitIndex:
    """Graphs reachable from ``seed`` by pivots, each with one pivot sequence.

    Keys are canonical digests (``labeled=False``) or the labelled rows
    themselves (``labeled=True``); ``members[key]`` is the first graph reached
    with that key and ``witness[key]`` the pivots that produce it from
    ``seed``.
    """

    seed: Graph
    labeled: bool
    members: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.members)

    def key(self, g: Graph):
        return g.rows if self.labeled else canonical_hash(g)

    def __contains__(self, g: Graph) -> bool:
        return self.key(g) in self.members

    def graphs(self) -> list[Graph]:
        return list(self.members.values())


def pivot_orbit(
    g: Graph,
    max_size: int = DEFAULT_MAX_SIZE,
    labeled: bool = False,
    vertex_once: bool = False,
) -> OrbitIndex:
    """Breadth-first closure of ``g`` under pivoting on every edge.

    With ``vertex_once`` a sequence may pivot on each vertex at most once,
    which prunes the search but is only a heuristic here.
    """
    if g.n > MAX_SEARCH_N:
        raise SearchLimitError(f"orbit search limited to n <= {MAX_SEARCH_N}, got {g.n}")
    index = OrbitIndex(g, labeled)
    k0 = index.key(g)
    index.members[k0] = g
    index.witness[k0] = []
    seen = {(k0, 0)}
    queue = deque([(g, 0, [])])
    while queue:
        cur, used, seq = queue.popleft()
        for u, v in cur.edges():
            if vertex_once and (used >> u & 1 or used >> v & 1):
                continue
            nxt = pivot(cur, u, v)
            nused = used | (1 << u) | (1 << v) if vertex_once else 0
            key = index.key(nxt)
            if (key, nused) in seen:
                continue
            if key not in index.members:
                if len(index.members) >= max_size:
                    index.truncated = True
                    return index
                index.members[key] = nxt
                index.witness[key] = seq + [(u, v)]
            seen.add((key, nused))
            queue.append((nxt, nused, seq + [(u, v)]))
    return index


# -- induced subgraph matching ------------------------------------------------


def find_induced(g: Graph, h: Graph) -> dict[int, int] | None:
    """An injective map ``V(g) -> V(h)`` preserving adjacency and non-adjacency.

    Backtracking in the VF2 style: vertices of ``g`` are matched in a
    connectivity-first order, candidates are filtered by degree and by
    consistency with every vertex already matched.
    """
    if g.n > h.n:
        return None
    order: list[int] = []
    placed = set()
    for start in sorted(g.vertices, key=lambda v: -g.degree(v)):
        if start in placed:
            continue
        frontier = [start]
        while frontier:
            frontier.sort(key=lambda v: (-sum(g.has_edge(v, w) for w in order), -g.degree(v)))
            v = frontier.pop(0)
            if v in placed:
                continue
            placed.add(v)
            order.append(v)
            frontier.extend(w for w in g.adjacency_lists[v] if w not in placed)
    mapping: dict[int, int] = {}
    used = set()

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        v = order[k]
        for w in h.vertices:
            if w in used or h.degree(w) < g.degree(v):
                continue
            if all(g.has_edge(v, x) == h.has_edge(w, mapping[x]) for x in order[:k]):
                mapping[v] = w
                used.add(w)
                if extend(k + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    return dict(mapping) if extend(0) else None


def induced_on(g: Graph, h: Graph, embedding: Mapping[int, int]) -> bool:
    """Whether ``embedding`` (g-vertex -> h-vertex) is an induced embedding."""
    if sorted(embedding) != list(g.vertices) or len(set(embedding.values())) != g.n:
        return False
    return all(
        g.has_edge(a, b) == h.has_edge(embedding[a], embedding[b])
        for a in g.vertices for b in g.vertices if a < b
    )


# -- pivot minors -------------------------------------------------------------


@dataclass
class MinorResult:
    """``status`` is ``"yes"``, ``"no"`` or ``"unknown"`` (search truncated)."""

    status: str
    witness: dict | None = None
    orbit_size: int = 0

    @property
    def found(self) -> bool:
        return self.status == "yes"

    def witness_json(self) -> str:
        return json.dumps(self.witness)


def is_pivot_minor(
    g: Graph,
    h: Graph,
    mode: str = "up_to_iso",
    max_size: int = DEFAULT_MAX_SIZE,
    embedding: Mapping[int, int] | None = None,
    vertex_once: bool = False,
) -> MinorResult:
    """Search the pivot orbit of ``h`` for an induced copy of ``g``.

    ``mode="labeled"`` fixes the embedding (identity on ``V(g)`` unless given)
    and explores the labelled orbit; ``mode="up_to_iso"`` explores the orbit up
    to isomorphism and matches ``g`` anywhere.
    """
    if mode not in ("labeled", "up_to_iso"):
        raise ValueError(f"unknown mode {mode!r}")
    if g.n > h.n:
        return MinorResult("no")
    labeled = mode == "labeled"
    if labeled:
        emb = dict(embedding) if embedding is not None else {v: v for v in g.vertices}
        if sorted(emb) != list(g.vertices) or not set(emb.values()) <= set(h.vertices):
            raise GraphError("embedding must map every vertex of g into h")
    orbit = pivot_orbit(h, max_size=max_size, labeled=labeled, vertex_once=vertex_once)
    for key, member in orbit.members.items():
        found = emb if labeled and induced_on(g, member, emb) else None
        if not labeled:
            found = find_induced(g, member)
        if found is not None:
            keep = set(found.values())
            witness = {
                "pivots": [list(p) for p in orbit.witness[key]],
                "deletions": [v for v in h.vertices if v not in keep],
                "embedding": {str(a): b for a, b in sorted(found.items())},
            }
            return MinorResult("yes", witness, len(orbit))
    return MinorResult("unknown" if orbit.truncated else "no", None, len(orbit))


def replay_witness(h: Graph, witness: Mapping) -> Graph:
    """Apply the witness pivots to ``h``, then delete its deletion set.

    Surviving vertices are relabelled in increasing order of their labels in
    ``h``.
    """
    cur = h
    for k, step in enumerate(witness.get("pivots", [])):
        u, v = step
        if not (0 <= u < cur.n and 0 <= v < cur.n) or not cur.has_edge(u, v):
            raise GraphError(f"witness step {k}: {u}-{v} is not an edge")
        cur = pivot(cur, u, v)
    return delete_vertices(cur, witness.get("deletions", []))[0]


def check_witness(g: Graph, h: Graph, witness: Mapping) -> bool:
    """Replay ``witness`` on ``h`` and compare with ``g`` through its embedding."""
    residual = replay_witness(h, witness)
    deleted = set(witness.get("deletions", []))
    survivors = [v for v in h.vertices if v not in deleted]
    pos = {v: i for i, v in enumerate(survivors)}
    emb = {int(a): b for a, b in witness.get("embedding", {str(v): survivors[v] for v in g.vertices}).items()}
    if residual.n != g.n or set(emb.values()) != set(survivors):
        return False
    return induced_on(g, residual, {a: pos[b] for a, b in emb.items()})


def witness_from_schedule(schedule: Sequence[Mapping], outputs: Sequence[int]) -> dict:
    """Pivots-then-deletions witness from a replay schedule.

    A replay deletes vertices as it goes. Deleting ``w`` commutes with a later
    pivot on ``uv`` (the pivot only reads the neighbourhoods of ``u`` and
    ``v``), and the two vertices of an X pair are deleted right after their
    pivot and never used again, so the label exchange is harmless. Hence the
    X pairs, pivoted in order on the full graph, followed by deleting every
    measured vertex, reproduce the replay. ``outputs[i]`` is the vertex that
    plays vertex ``i`` of the target.
    """
    pivots = [list(e["vertices"]) for e in schedule if e["op"] == "Xpair"]
    deleted = sorted(v for e in schedule for v in e["vertices"])
    return {
        "pivots": pivots,
        "deletions": deleted,
        "embedding": {str(i): o for i, o in enumerate(outputs)},
    }
