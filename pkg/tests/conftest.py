from __future__ import annotations

from hypothesis import strategies as st

from pivotminor.graph import Graph


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 7) -> Graph:
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, (e for e, keep in zip(pairs, mask) if keep))


@st.composite
def graphs_with_edge(draw, min_n: int = 2, max_n: int = 7) -> tuple[Graph, int, int]:
    g = draw(graphs(min_n, max_n).filter(lambda g: g.edge_count > 0))
    u, v = draw(st.sampled_from(g.edges()))
    return g, u, v


@st.composite
def signed_states(draw, min_n: int = 1, max_n: int = 6):
    from pivotminor.signed import SignedGraphState

    g = draw(graphs(min_n, max_n))
    sign = draw(st.frozensets(st.integers(0, g.n - 1))) if g.n else frozenset()
    return SignedGraphState(g, sign)


# -- acceptance report --------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str, list[str]]] = {}


def record_criterion(number: int, ok: bool, summary: str, details: list[str] | None = None) -> None:
    ACCEPTANCE[number] = (ok, summary, details or [])
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {summary}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, summary, details = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {summary}")
        for line in details:
            terminalreporter.write_line(f"    {line}")
