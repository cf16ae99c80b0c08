"""Simple undirected graphs stored as vertex-indexed bit rows.

Vertices are the dense integers ``0..n-1``. Row ``u`` is an ``int`` whose bit
``v`` is set iff ``uv`` is an edge. Graphs are immutable; every operation
returns a new value.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from functools import cached_property


class GraphError(ValueError):
    """Raised for malformed graphs or operations on missing vertices/edges."""


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def set_of(mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


@dataclass(frozen=True)
class Graph:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.n:
            raise GraphError(f"expected {self.n} rows, got {len(self.rows)}")

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop on {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {u}-{v} outside 0..{n - 1}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_adjacency(cls, matrix) -> Graph:
        n = len(matrix)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if matrix[i][j]]
        return cls.from_edges(n, edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    def check_vertex(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise GraphError(f"unknown vertex {u} (graph has {self.n} vertices)")

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbors(self, u: int) -> frozenset[int]:
        self.check_vertex(u)
        return set_of(self.rows[u])

    def degree(self, u: int) -> int:
        return self.rows[u].bit_count()

    @cached_property
    def adjacency_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(bits(r)) for r in self.rows)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nb in enumerate(self.adjacency_lists) for v in nb if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.adjacency_lists) // 2

    def to_matrix(self) -> list[list[int]]:
        return [[(r >> v) & 1 for v in range(self.n)] for r in self.rows]

    def relabel(self, perm: list[int] | tuple[int, ...]) -> Graph:
        """Return the graph in which old vertex ``u`` is called ``perm[u]``."""
        rows = [0] * self.n
        for u, nb in enumerate(self.adjacency_lists):
            rows[perm[u]] = mask_of(perm[v] for v in nb)
        return Graph(self.n, tuple(rows))

    def induced(self, keep: Iterable[int]) -> tuple[Graph, dict[int, int]]:
        """Induced subgraph on ``keep``, compacted in increasing label order.

        Returns the subgraph and the relabelling map old -> new.
        """
        kept = sorted(set(keep))
        for u in kept:
            self.check_vertex(u)
        new = {u: i for i, u in enumerate(kept)}
        rows = tuple(mask_of(new[v] for v in self.adjacency_lists[u] if v in new) for u in kept)
        return Graph(len(kept), rows), new

    def __str__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"


def local_complement(g: Graph, u: int) -> Graph:
    """Toggle every edge and non-edge inside the neighbourhood of ``u``."""
    g.check_vertex(u)
    nu = g.rows[u]
    rows = list(g.rows)
    for v in bits(nu):
        rows[v] ^= nu & ~(1 << v)
    return Graph(g.n, tuple(rows))


def _check_edge(g: Graph, u: int, v: int) -> None:
    g.check_vertex(u)
    g.check_vertex(v)
    if not g.has_edge(u, v):
        raise GraphError(f"pivot needs an edge, {u}-{v} is not one")


def pivot(g: Graph, u: int, v: int) -> Graph:
    """Pivot on the edge ``uv``.

    With ``C = N(u) & N(v)``, ``A = N(u) - C - v`` and ``B = N(v) - C - u``
    every pair across two different classes among A, B, C is toggled, then
    the rows of ``u`` and ``v`` are exchanged.
    """
    _check_edge(g, u, v)
    nu = g.rows[u] & ~(1 << v)
    nv = g.rows[v] & ~(1 << u)
    c = nu & nv
    a = nu & ~c
    b = nv & ~c
    rows = list(g.rows)
    for x in bits(a):
        rows[x] ^= b | c
    for x in bits(b):
        rows[x] ^= a | c
    for x in bits(c):
        rows[x] ^= a | b
    # exchange the labels u and v; only rows touching u or v change
    bu, bv = 1 << u, 1 << v
    for x in bits((rows[u] | rows[v]) & ~bu & ~bv):
        r = rows[x]
        if bool(r & bu) != bool(r & bv):
            rows[x] = r ^ bu ^ bv
    ru, rv = rows[u], rows[v]
    rows[u] = _swap_bits(rv, bu, bv)
    rows[v] = _swap_bits(ru, bu, bv)
    return Graph(g.n, tuple(rows))


def _swap_bits(r: int, bu: int, bv: int) -> int:
    return r ^ bu ^ bv if bool(r & bu) != bool(r & bv) else r


def pivot_by_local_complements(g: Graph, u: int, v: int) -> Graph:
    """``g * u * v * u``; the reference route for :func:`pivot`."""
    _check_edge(g, u, v)
    return local_complement(local_complement(local_complement(g, u), v), u)


def _transposition(n: int, u: int, v: int) -> list[int]:
    perm = list(range(n))
    perm[u], perm[v] = v, u
    return perm


def delete_vertex(g: Graph, u: int) -> Graph:
    g.check_vertex(u)
    return delete_vertices(g, [u])[0]


def delete_vertices(g: Graph, us: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Delete ``us``; surviving labels are compacted, map old -> new returned."""
    gone = set(us)
    for u in gone:
        g.check_vertex(u)
    return g.induced(v for v in g.vertices if v not in gone)


def odd_neighborhood(g: Graph, b: Iterable[int]) -> frozenset[int]:
    """Vertices with an odd number of neighbours in ``b``."""
    bm = mask_of(b)
    if bm >> g.n:
        raise GraphError("vertex set is not a subset of the graph")
    return frozenset(v for v in g.vertices if (g.rows[v] & bm).bit_count() & 1)


def odd_neighborhood_inductive(g: Graph, b: Iterable[int]) -> frozenset[int]:
    """``Odd({}) = {}`` and ``Odd(B + u) = Odd(B) ^ N(u)``."""
    acc = 0
    for u in b:
        acc ^= g.rows[u]
    return set_of(acc)


def is_bipartite(g: Graph) -> tuple[bool, dict[int, int] | None]:
    """Return ``(True, colouring)`` or ``(False, None)``."""
    colour: dict[int, int] = {}
    adj = g.adjacency_lists
    for s in g.vertices:
        if s in colour:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    queue.append(y)
                elif colour[y] == colour[x]:
                    return False, None
    return True, colour


def complement(g: Graph) -> Graph:
    full = (1 << g.n) - 1
    return Graph(g.n, tuple(full & ~r & ~(1 << u) for u, r in enumerate(g.rows)))


def disjoint_union(g: Graph, h: Graph) -> Graph:
    shifted = tuple(r << g.n for r in h.rows)
    return Graph(g.n + h.n, g.rows + shifted)


# -- generators -------------------------------------------------------------

GRID_KINDS = ("path", "rectangular", "hexagonal", "triangular")


def grid_index(r: int, c: int, cols: int) -> int:
    return r * cols + c


def grid_edges(kind: str, rows: int, cols: int) -> Iterator[tuple[int, int]]:
    """Edges of the requested lattice, vertex ``(r, c)`` labelled ``r*cols + c``.

    The triangular grid is the rectangular grid plus, in every unit face, the
    diagonal joining its lower-left corner ``(r+1, c)`` to its upper-right
    corner ``(r, c+1)``. The hexagonal grid is the brick-wall lattice: all
    horizontal edges and the vertical edges ``(r, c)-(r+1, c)`` with
    ``r + c`` even.
    """
    for r in range(rows):
        for c in range(cols):
            here = r * cols + c
            if c + 1 < cols:
                yield here, here + 1
            if r + 1 < rows:
                if kind != "hexagonal" or (r + c) % 2 == 0:
                    yield here, here + cols
                if kind == "triangular" and c + 1 < cols:
                    yield here + 1, here + cols
    if kind not in GRID_KINDS:
        raise GraphError(f"unknown grid kind {kind!r}")


def generate(kind: str, rows: int = 1, cols: int = 1) -> Graph:
    if kind not in GRID_KINDS:
        raise GraphError(f"unknown grid kind {kind!r}; expected one of {GRID_KINDS}")
    if kind == "path":
        rows = 1
    if rows < 1 or cols < 1:
        raise GraphError("grid dimensions must be positive")
    return Graph.from_edges(rows * cols, grid_edges(kind, rows, cols))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def all_graphs(n: int) -> Iterator[Graph]:
    """Every labelled graph on ``n`` vertices."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for code in range(1 << len(pairs)):
        yield Graph.from_edges(n, [p for k, p in enumerate(pairs) if code >> k & 1])


def random_graph(n: int, rng, p: float = 0.5) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


# -- edge-list text format ----------------------------------------------------


def format_edge_list(g: Graph) -> str:
    """``"n m"`` header then one ``"u v"`` line per edge, ``u < v``, sorted."""
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int, count: int) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise GraphError(f"line {lineno}: expected {count} integers, got {line!r}")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise GraphError(f"line {lineno}: not an integer in {line!r}") from None


def parse_edge_list(text: str) -> Graph:
    """Read the edge-list format; loops, duplicates and bad counts are errors."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphError("empty edge list")
    g, rest = parse_edge_list_block(lines)
    if rest:
        raise GraphError(f"{len(rest)} trailing lines after the declared edges")
    return g


def parse_edge_list_block(lines: list[str]) -> tuple[Graph, list[str]]:
    """Parse one edge-list block from non-empty ``lines``; return the rest."""
    n, m = _ints(lines[0], 1, 2)
    if n < 0 or m < 0:
        raise GraphError("negative vertex or edge count")
    if len(lines) < 1 + m:
        raise GraphError(f"header promises {m} edges, found {len(lines) - 1}")
    seen: set[tuple[int, int]] = set()
    edges = []
    for k in range(m):
        u, v = _ints(lines[1 + k], 2 + k, 2)
        if u == v:
            raise GraphError(f"line {2 + k}: self-loop on {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"line {2 + k}: duplicate edge {key[0]} {key[1]}")
        seen.add(key)
        edges.append(key)
    return Graph.from_edges(n, edges), lines[1 + m:]
