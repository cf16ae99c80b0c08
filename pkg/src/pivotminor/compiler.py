"""Compile a graph into an X/Z measurement plan on a triangular grid.

Pipeline: ``prep_circuit`` (one CZ per edge on ``|+>^n``), ``planarize``
(route long-range CZs with SWAPs, expand SWAPs into H and CZ, cancel adjacent
duplicates), ``layering`` (ASAP with the tile spacing rule) and ``layout``
(place one tile per wire and layer, then pick the X, Z and output vertices).

Grid geometry
-------------
The grid has ``4n`` rows and ``4d`` columns; ``(r, c)`` is vertex
``r * 4d + c``. Wire ``i`` owns rows ``4i .. 4i+3`` and runs along its home
row ``4i + 1``; layer ``t`` owns columns ``4t .. 4t+4``, adjacent layers
sharing column ``4t + 4``. Tiles are paths given in coordinates relative to
``(4i, 4t)``; a wire visits the home vertex of every shared column. A path of
``L`` edges carries the logical qubit through ``H^L``, so Id uses 4 edges and
H uses 5. The CZ tile bends the upper wire down and the lower wire up and
joins them by a two-vertex connector; X-measuring the connector's inner pair
leaves one edge between the attachment points, which is the CZ. Every other
grid vertex is Z-measured, i.e. deleted.

A wire starts at column 1 (its column-0 home vertex is deleted), so the path
vertex at tile index ``k`` holds ``H^(k-1)`` applied to the logical state. CZ
connectors attach at odd indices and outputs sit at odd indices of Id and CZ
tiles and at even indices of H tiles, where the qubit is exactly logical.

Two CZ tiles in one layer must be separated by at least one single-wire tile,
otherwise their connectors would touch.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

from .graph import Graph, generate
from .oracle import Gate
from .signed import (
    OutcomeSource,
    ReplayResult,
    SignedGraphState,
    ZeroOutcomes,
    outcome_source,
    replay_plan,
)

# Every layer holds a gate, so d is at most the gate count. An edge (i, j)
# costs at most 2(j - i - 1) SWAPs of 9 gates plus its CZ, so for K_n
# d <= 18 C(n,3) + C(n,2) <= 3 n^3.
DEPTH_CONSTANT = 3

TILE_KINDS = ("Id", "H", "CZ-upper", "CZ-lower")

# relative (row, col) paths, entry column 0 to exit column 4
TILE_PATHS: dict[str, tuple[tuple[int, int], ...]] = {
    "Id": ((1, 0), (1, 1), (1, 2), (1, 3), (1, 4)),
    "H": ((1, 0), (1, 1), (1, 2), (2, 2), (2, 3), (1, 4)),
    "CZ-upper": ((1, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 3), (1, 4)),
    # relative to the band of the wire above
    "CZ-lower": ((5, 0), (5, 1), (6, 1), (7, 1), (7, 2), (6, 3), (5, 4)),
}
CONNECTOR = ((3, 3), (4, 2))  # inner pair, X-measured
ATTACH = {"CZ-upper": 5, "CZ-lower": 1}
# path index of the output when the tile sits in the last (truncated) layer
OUTPUT_INDEX = {"Id": 3, "H": 2, "CZ-upper": 5, "CZ-lower": 1}


class CompileError(ValueError):
    """Malformed circuits or internal layout failures."""


class VerificationError(AssertionError):
    """A compilation failed certificate replay."""


# -- circuits -----------------------------------------------------------------


@dataclass(frozen=True)
class Circuit:
    """Gates over wires ``0..n-1`` acting on ``|+>^n`` when ``prepare_plus``.

    ``prepare_plus`` records the initial column of H on ``|0>^n``; it is not
    part of ``gates``.
    """

    n: int
    gates: tuple[Gate, ...]
    prepare_plus: bool = True

    @property
    def size(self) -> int:
        return len(self.gates)

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def is_planar(self) -> bool:
        return all(len(g.targets) == 1 or abs(g.targets[0] - g.targets[1]) == 1 for g in self.gates)

    def to_json(self) -> dict:
        return {
            "wires": self.n,
            "prepare_plus": self.prepare_plus,
            "gates": [[g.kind, *g.targets] for g in self.gates],
        }


def prep_circuit(g: Graph) -> Circuit:
    """One CZ per edge, in sorted edge order."""
    return Circuit(g.n, tuple(Gate("CZ", e) for e in g.edges()))


def swap_decomposition(u: int, v: int) -> list[Gate]:
    """SWAP as ``H_u CZ H_u H_v CZ H_u H_v CZ H_u`` (three CNOTs)."""
    h = lambda w: Gate("H", (w,))  # noqa: E731
    cz = Gate("CZ", (min(u, v), max(u, v)))
    return [h(u), cz, h(u), h(v), cz, h(u), h(v), cz, h(u)]


def _route(gates: Sequence[Gate]) -> list[Gate]:
    out: list[Gate] = []

    def push_swap(w: int) -> None:
        s = Gate("SWAP", (w, w + 1))
        if out and out[-1] == s:
            out.pop()
        else:
            out.append(s)

    for gate in gates:
        if gate.kind != "CZ" or abs(gate.targets[0] - gate.targets[1]) == 1:
            out.append(gate)
            continue
        i, j = sorted(gate.targets)
        for w in range(i, j - 1):
            push_swap(w)
        out.append(Gate("CZ", (j - 1, j)))
        for w in range(j - 2, i - 1, -1):
            push_swap(w)
    return out


def _cancel_hadamards(gates: Sequence[Gate]) -> list[Gate]:
    """Drop ``H_w H_w`` pairs with nothing on wire ``w`` in between."""
    kept: list[Gate | None] = []
    last: dict[int, int] = {}
    for gate in gates:
        if gate.kind == "H":
            (w,) = gate.targets
            k = last.get(w)
            if k is not None and kept[k] is not None and kept[k].kind == "H":
                kept[k] = None
                del last[w]
                continue
        kept.append(gate)
        for w in gate.targets:
            last[w] = len(kept) - 1
    return [g for g in kept if g is not None]


def planarize(c: Circuit, expand_swaps: bool = True) -> Circuit:
    """Make every two-wire gate act on adjacent wires.

    A CZ on wires ``i < j`` becomes SWAPs walking wire ``i`` down to ``j - 1``,
    the adjacent CZ and the reverse SWAPs; a SWAP that would immediately undo
    the previous one is cancelled. With ``expand_swaps`` each SWAP is replaced
    by its nine-gate H/CZ form and back-to-back Hadamards cancel.
    """
    for gate in c.gates:
        if gate.kind not in ("CZ", "H", "SWAP"):
            raise CompileError(f"unsupported gate {gate.kind}")
        if any(not 0 <= w < c.n for w in gate.targets):
            raise CompileError(f"gate {gate} addresses a missing wire")
        if gate.kind == "SWAP" and abs(gate.targets[0] - gate.targets[1]) != 1:
            raise CompileError("only adjacent SWAPs are supported")
    routed = _route(c.gates)
    if expand_swaps:
        expanded: list[Gate] = []
        for gate in routed:
            if gate.kind == "SWAP":
                expanded.extend(swap_decomposition(*gate.targets))
            else:
                expanded.append(gate)
        routed = _cancel_hadamards(expanded)
    return Circuit(c.n, tuple(routed), c.prepare_plus)


def layering(c: Circuit) -> list[dict[int, str]]:
    """ASAP layers; each maps wire -> tile kind, idle wires omitted.

    A layer holds at most one gate per wire, and CZ gates on ``(i, i+1)`` and
    ``(i+2, i+3)`` never share a layer.
    """
    if not c.is_planar() or c.count("SWAP"):
        raise CompileError("layering needs a planar SWAP-free circuit")
    layers: list[dict[int, str]] = []
    cz_top: list[set[int]] = []
    ready = [0] * c.n
    for gate in c.gates:
        wires = sorted(gate.targets)
        t = max(ready[w] for w in wires)
        while True:
            while t >= len(layers):
                layers.append({})
                cz_top.append(set())
            if gate.kind == "CZ":
                i = wires[0]
                if i - 2 in cz_top[t] or i + 2 in cz_top[t]:
                    t += 1
                    continue
            break
        if gate.kind == "CZ":
            layers[t][wires[0]] = "CZ-upper"
            layers[t][wires[1]] = "CZ-lower"
            cz_top[t].add(wires[0])
        else:
            layers[t][wires[0]] = "H"
        for w in wires:
            ready[w] = t + 1
    return layers


# -- layout -------------------------------------------------------------------


@dataclass
class GridCompilation:
    n: int
    depth: int
    tiles: dict[tuple[int, int], str]
    x_set: frozenset[int]
    z_set: frozenset[int]
    outputs: tuple[int, ...]
    schedule: list[dict] = field(default_factory=list)
    circuit: Circuit | None = None

    @property
    def rows(self) -> int:
        return 4 * self.n

    @property
    def cols(self) -> int:
        return 4 * self.depth

    @property
    def vertex_count(self) -> int:
        return self.rows * self.cols

    @property
    def grid(self) -> Graph:
        return triangular_grid(self.rows, self.cols)

    @property
    def output_map(self) -> dict[int, int]:
        """Grid output vertex -> vertex of the compiled graph (its wire)."""
        return {o: i for i, o in enumerate(self.outputs)}

    def coords(self, v: int) -> tuple[int, int]:
        return divmod(v, self.cols)

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "wires": self.n,
            "depth": self.depth,
            "tiles": [[w, t, k] for (w, t), k in sorted(self.tiles.items())],
            "x_set": sorted(self.x_set),
            "z_set": sorted(self.z_set),
            "outputs": list(self.outputs),
            "output_map": {str(o): i for o, i in self.output_map.items()},
            "schedule": self.schedule,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: Mapping) -> GridCompilation:
        try:
            rows, cols = int(data["rows"]), int(data["cols"])
            if rows % 4 or cols % 4 or cols == 0:
                raise CompileError(f"grid {rows}x{cols} is not 4n x 4d")
            n = rows // 4
            outputs = tuple(int(v) for v in data["outputs"])
            omap = {int(k): int(v) for k, v in data.get("output_map", {}).items()}
            if omap and any(omap.get(o) != i for i, o in enumerate(outputs)):
                raise CompileError("output_map disagrees with outputs")
            return cls(
                n=n,
                depth=cols // 4,
                tiles={(int(w), int(t)): k for w, t, k in data.get("tiles", [])},
                x_set=frozenset(int(v) for v in data["x_set"]),
                z_set=frozenset(int(v) for v in data["z_set"]),
                outputs=outputs,
                schedule=list(data.get("schedule", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CompileError):
                raise
            raise CompileError(f"malformed compilation JSON: {exc}") from None


@lru_cache(maxsize=16)
def triangular_grid(rows: int, cols: int) -> Graph:
    """Shared immutable grid graph; an empty graph when ``rows == 0``."""
    return generate("triangular", rows, cols) if rows else Graph.empty(0)


def _tile_path(kind: str, wire: int, layer: int) -> list[tuple[int, int]]:
    band = 4 * (wire - 1) if kind == "CZ-lower" else 4 * wire
    return [(band + r, 4 * layer + c) for r, c in TILE_PATHS[kind]]


def layout(c: Circuit) -> GridCompilation:
    """Place tiles for a planar SWAP-free circuit and choose the measurements."""
    layers = layering(c)
    if not layers:
        layers = [{}]
    d = len(layers)
    n = c.n
    cols = 4 * d
    label = lambda rc: rc[0] * cols + rc[1]  # noqa: E731
    tiles: dict[tuple[int, int], str] = {}
    keep_x: set[int] = set()
    outputs: list[int] = []
    for w in range(n):
        for t in range(d):
            tiles[(w, t)] = layers[t].get(w, "Id")
        for t in range(d):
            kind = tiles[(w, t)]
            path = _tile_path(kind, w, t)
            if kind not in TILE_PATHS:
                raise CompileError(f"tile library has no {kind!r}")
            start = 1 if t == 0 else 0
            stop = OUTPUT_INDEX[kind] if t == d - 1 else len(path) - 1
            for rc in path[start:stop]:
                keep_x.add(label(rc))
            if t == d - 1:
                outputs.append(label(path[stop]))
            if kind == "CZ-upper":
                band = 4 * w
                keep_x.update(label((band + r, 4 * t + cc)) for r, cc in CONNECTOR)
    out_set = set(outputs)
    if keep_x & out_set:
        raise CompileError("an output vertex is also X-measured (layout bug)")
    z = frozenset(range(4 * n * cols)) - keep_x - out_set
    return GridCompilation(n, d, tiles, frozenset(keep_x), z, tuple(outputs), circuit=c)


# -- end to end ---------------------------------------------------------------


@dataclass
class VerifyResult:
    ok: bool
    graph: Graph
    sign: frozenset[int]
    replay: ReplayResult
    message: str = ""

    def witness(self) -> dict:
        return self.replay.witness()


def _residual(
    comp: GridCompilation, outcomes: OutcomeSource, strategy: str = "lowest"
) -> tuple[ReplayResult, Graph, frozenset[int]]:
    st = SignedGraphState(comp.grid)
    res = replay_plan(st, comp.x_set, comp.z_set, outcomes, strategy=strategy)
    # compacted label -> compiled-graph vertex
    to_g = {}
    omap = comp.output_map
    for grid_v, compact in res.label_map.items():
        if grid_v not in omap:
            raise VerificationError(f"grid vertex {grid_v} survives but is not an output")
        to_g[compact] = omap[grid_v]
    perm = [to_g[k] for k in range(res.state.n)]
    return res, res.state.graph.relabel(perm), frozenset(to_g[u] for u in res.state.sign)


def _first_divergence(expected: Sequence[Mapping], actual: Sequence[Mapping]) -> str:
    for k, (a, b) in enumerate(zip(expected, actual)):
        if (a["op"], list(a["vertices"])) != (b["op"], list(b["vertices"])):
            return f"step {k}: certificate has {a['op']} {a['vertices']}, replay did {b['op']} {b['vertices']}"
    if len(expected) != len(actual):
        return f"step {min(len(expected), len(actual))}: schedule lengths differ ({len(expected)} vs {len(actual)})"
    return "schedules agree"


def verify(
    comp: GridCompilation,
    g: Graph,
    outcomes: OutcomeSource | str | None = None,
    seed: int = 0,
    strategy: str = "lowest",
) -> VerifyResult:
    """Replay the plan on the grid graph state and compare with ``g``.

    Zero outcomes must give exactly ``(g, {})``; other outcomes must give the
    graph ``g`` with some sign, which is returned.
    """
    source = outcome_source(outcomes, seed)
    x, z = set(comp.x_set), set(comp.z_set)
    allv = set(range(comp.vertex_count))
    problems = []
    if x & z:
        problems.append("x_set and z_set overlap")
    if (x | z) & set(comp.outputs) or (x | z | set(comp.outputs)) != allv:
        problems.append("x_set, z_set and outputs do not partition the grid")
    if len(comp.outputs) != g.n:
        problems.append(f"{len(comp.outputs)} outputs for a {g.n}-vertex graph")
    if problems:
        empty = ReplayResult(SignedGraphState(Graph.empty(0)))
        return VerifyResult(False, Graph.empty(0), frozenset(), empty, "; ".join(problems))
    try:
        res, graph, sign = _residual(comp, source, strategy)
    except (ValueError, VerificationError) as exc:
        empty = ReplayResult(SignedGraphState(Graph.empty(0)))
        return VerifyResult(False, Graph.empty(0), frozenset(), empty, f"replay failed: {exc}")
    msg = ""
    ok = graph == g
    if not ok:
        msg = "residual graph differs from the target"
        if comp.schedule:
            msg += "; " + _first_divergence(comp.schedule, res.schedule)
    elif isinstance(source, ZeroOutcomes) and sign:
        ok = False
        msg = f"zero outcomes left sign {sorted(sign)}"
    return VerifyResult(ok, graph, sign, res, msg)


def compile_graph(g: Graph) -> GridCompilation:
    """``prep_circuit -> planarize -> layout`` plus the zero-outcome certificate."""
    circuit = planarize(prep_circuit(g))
    comp = layout(circuit)
    if comp.n == 0:
        return comp
    result = verify(comp, g)
    if not result.ok:
        raise VerificationError(f"compilation of {g} failed its own replay: {result.message}")
    comp.schedule = result.replay.schedule
    return comp


def depth_bound(n: int) -> int:
    return DEPTH_CONSTANT * max(n, 1) ** 3
