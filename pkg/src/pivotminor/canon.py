"""Exact canonical forms for small graphs.

Individualization-refinement: colour refinement to an equitable ordered
partition, then branch on the first smallest non-singleton cell. Each leaf is
a labelling; the canonical form is the lexicographically smallest relabelled
row tuple over all leaves. A partition whose cells are pairwise homogeneous
(each cell is a clique or independent, and any two cells are fully joined or
fully disjoint) has every completion equivalent, so only one leaf is explored.
"""

from __future__ import annotations

import hashlib

from .graph import Graph, GraphError

MAX_CANON_N = 10


def _refine(g: Graph, cells: list[list[int]]) -> list[list[int]]:
    while True:
        index = {}
        for k, cell in enumerate(cells):
            for v in cell:
                index[v] = k
        out: list[list[int]] = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            sig = {}
            for v in cell:
                counts = [0] * len(cells)
                for w in g.adjacency_lists[v]:
                    counts[index[w]] += 1
                sig[v] = tuple(counts)
            groups: dict[tuple[int, ...], list[int]] = {}
            for v in cell:
                groups.setdefault(sig[v], []).append(v)
            if len(groups) > 1:
                changed = True
            out.extend(groups[key] for key in sorted(groups))
        cells = out
        if not changed:
            return cells


def _homogeneous(g: Graph, cells: list[list[int]]) -> bool:
    for i, a in enumerate(cells):
        for b in cells[i:]:
            seen = set()
            for x in a:
                for y in b:
                    if x != y:
                        seen.add(g.has_edge(x, y))
            if len(seen) > 1:
                return False
    return True


def _leaf_form(g: Graph, order: list[int]) -> tuple[int, ...]:
    perm = [0] * g.n
    for pos, v in enumerate(order):
        perm[v] = pos
    return g.relabel(perm).rows


def canonical_form(g: Graph) -> tuple[tuple[int, ...], list[int]]:
    """Return the canonical row tuple and one labelling achieving it.

    The labelling maps vertex ``v`` of ``g`` to position ``perm[v]``.
    """
    if g.n > MAX_CANON_N:
        raise GraphError(f"canonical form limited to n <= {MAX_CANON_N}, got {g.n}")
    best: list = [None, None]

    def visit(cells: list[list[int]]) -> None:
        cells = _refine(g, cells)
        if all(len(c) == 1 for c in cells) or _homogeneous(g, cells):
            order = [v for c in cells for v in c]
            form = _leaf_form(g, order)
            if best[0] is None or form < best[0]:
                best[0], best[1] = form, order
            return
        k = min((i for i, c in enumerate(cells) if len(c) > 1), key=lambda i: (len(cells[i]), i))
        for v in cells[k]:
            rest = [w for w in cells[k] if w != v]
            visit(cells[:k] + [[v], rest] + cells[k + 1:])

    visit([list(g.vertices)] if g.n else [])
    if g.n == 0:
        return (), []
    perm = [0] * g.n
    for pos, v in enumerate(best[1]):
        perm[v] = pos
    return best[0], perm


def canonical_hash(g: Graph) -> str:
    """Isomorphism-invariant sha256 hex digest (exact for ``n <= 10``)."""
    form, _ = canonical_form(g)
    payload = f"{g.n}:" + ",".join(format(r, "x") for r in form)
    return hashlib.sha256(payload.encode()).hexdigest()
