"""Command-line entry point: ``pivotminor <subcommand> ...``.

Exit status: 0 success, 1 verification failure, 2 usage error, 3 malformed
input file, 4 size limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import checks
from .canon import canonical_hash
from .compiler import CompileError, GridCompilation, VerificationError, compile_graph, depth_bound, verify
from .graph import (
    GRID_KINDS,
    Graph,
    GraphError,
    all_graphs,
    format_edge_list,
    generate,
    local_complement,
    parse_edge_list,
    pivot,
)
from .mbqc import Pattern, PatternError, simulate_pattern, transcript_json
from .oracle import OracleError, StateVector, basis_state
from .search import SearchLimitError, check_witness, is_pivot_minor, pivot_orbit, witness_from_schedule
from .signed import (
    NotExpressibleError,
    SignedGraphState,
    apply_hadamard_pair,
    apply_lc_op,
    format_signed_state,
    outcome_source,
    parse_signed_state,
    replay_plan,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_INPUT) from None


def _read_graph(path: str) -> Graph:
    try:
        return parse_edge_list(_read(path))
    except GraphError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None


def _read_json(path: str) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})", EXIT_INPUT) from None


def _emit(args: argparse.Namespace, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _graph_out(args: argparse.Namespace, g: Graph) -> str:
    if args.format == "json":
        return _dumps({"n": g.n, "edges": [list(e) for e in g.edges()]})
    return format_edge_list(g)


def _state_out(args: argparse.Namespace, st: SignedGraphState) -> str:
    if args.format == "json":
        return _dumps({"n": st.n, "edges": [list(e) for e in st.graph.edges()], "sign": sorted(st.sign)})
    return format_signed_state(st)


def _check_n(args: argparse.Namespace, n: int, what: str) -> None:
    if args.max_n is not None and n > args.max_n:
        raise CliError(f"{what} has {n} vertices, above --max-n {args.max_n}", EXIT_LIMIT)


def _vertex_list(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise CliError(f"bad vertex list {text!r}", EXIT_USAGE) from None


# -- subcommands --------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        g = generate(args.kind, args.rows, args.cols)
    except GraphError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    _emit(args, _graph_out(args, g))
    return EXIT_OK


def _load_state(path: str) -> tuple[SignedGraphState, bool]:
    text = _read(path)
    try:
        st = parse_signed_state(text)
    except GraphError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None
    signed = any(ln.strip().startswith("S:") for ln in text.splitlines())
    return st, signed


def cmd_lc(args: argparse.Namespace) -> int:
    st, signed = _load_state(args.graph)
    try:
        if signed:
            _emit(args, _state_out(args, apply_lc_op(st, args.u)))
        else:
            _emit(args, _graph_out(args, local_complement(st.graph, args.u)))
    except GraphError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    return EXIT_OK


def cmd_pivot(args: argparse.Namespace) -> int:
    st, signed = _load_state(args.graph)
    try:
        if signed:
            _emit(args, _state_out(args, apply_hadamard_pair(st, args.u, args.v)))
        else:
            _emit(args, _graph_out(args, pivot(st.graph, args.u, args.v)))
    except GraphError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    return EXIT_OK


def cmd_measure(args: argparse.Namespace) -> int:
    st, _ = _load_state(args.state)
    x, z = _vertex_list(args.x), _vertex_list(args.z)
    if args.plan:
        plan = _read_json(args.plan)
        x += [int(v) for v in plan.get("x_set", [])]
        z += [int(v) for v in plan.get("z_set", [])]
    try:
        res = replay_plan(st, x, z, outcome_source(args.outcomes, args.seed), strategy=args.strategy)
    except NotExpressibleError as exc:
        raise CliError(f"not expressible: {exc}", EXIT_FAIL) from None
    except (GraphError, ValueError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    if args.format == "json":
        out = {
            "n": res.state.n,
            "edges": [list(e) for e in res.state.graph.edges()],
            "sign": sorted(res.state.sign),
            "label_map": {str(k): v for k, v in sorted(res.label_map.items())},
            "schedule": res.schedule,
        }
        _emit(args, _dumps(out))
    else:
        _emit(args, format_signed_state(res.state) + "schedule: " + _dumps(res.schedule))
    return EXIT_OK


def cmd_compile(args: argparse.Namespace) -> int:
    g = _read_graph(args.graph)
    _check_n(args, g.n, "graph")
    try:
        comp = compile_graph(g)
    except (CompileError, VerificationError) as exc:
        raise CliError(f"compilation failed: {exc}", EXIT_FAIL) from None
    if args.format == "text":
        d = comp.depth
        _emit(args, f"wires {comp.n} depth {d} grid {comp.rows}x{comp.cols} vertices {comp.vertex_count} "
                    f"depth_bound {depth_bound(comp.n)}\n")
    else:
        _emit(args, _dumps(comp.to_json()))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    data = _read_json(args.compilation)
    try:
        comp = GridCompilation.from_json(data)
    except CompileError as exc:
        raise CliError(f"{args.compilation}: {exc}", EXIT_INPUT) from None
    g = _read_graph(args.graph)
    result = verify(comp, g, outcome_source(args.outcomes, args.seed), strategy=args.strategy)
    witness = witness_from_schedule(result.replay.schedule, comp.outputs) if result.ok else None
    if args.format == "json":
        _emit(args, _dumps({"ok": result.ok, "message": result.message, "sign": sorted(result.sign),
                            "witness": witness}))
    else:
        line = "certificate verified" if result.ok else f"certificate rejected: {result.message}"
        _emit(args, f"{line}; sign {sorted(result.sign)}")
    return EXIT_OK if result.ok else EXIT_FAIL


def _input_state(text: str, inputs: Sequence[int]) -> StateVector:
    k = len(inputs)
    if text == "plus":
        return StateVector(tuple(inputs), np.full(2**k, 2 ** (-k / 2), dtype=complex))
    if len(text) != k or set(text) - {"0", "1"}:
        raise CliError(f"--input must be 'plus' or a {k}-bit string, got {text!r}", EXIT_USAGE)
    return basis_state(inputs, [int(c) for c in text])


def cmd_simulate(args: argparse.Namespace) -> int:
    data = _read_json(args.pattern)
    try:
        p = Pattern.from_json(data)
    except PatternError as exc:
        raise CliError(f"{args.pattern}: {exc}", EXIT_INPUT) from None
    _check_n(args, len(p.open_graph.vertices), "pattern")
    psi = _input_state(args.input, p.open_graph.inputs)
    try:
        sim = simulate_pattern(p, psi, outcome_source(args.outcomes, args.seed))
    except OracleError as exc:
        code = EXIT_LIMIT if "limited" in str(exc) or "limit" in str(exc) else EXIT_FAIL
        raise CliError(str(exc), code) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    if args.format == "json":
        out = json.loads(transcript_json(sim))
        out["output_labels"] = list(sim.state.labels)
        out["output"] = [[round(float(a.real), 15), round(float(a.imag), 15)] for a in sim.corrected().amplitudes]
        _emit(args, _dumps(out))
    else:
        lines = [f"{t['vertex']} angle {t['adapted_angle']:.12f} outcome {t['outcome']}" for t in sim.transcript]
        lines.append("frame " + _dumps(sim.frame.to_json()))
        lines.append("corrected output (index real imag):")
        _emit(args, "\n".join(lines) + "\n" + sim.corrected().dump(tol=1e-15))
    return EXIT_OK


def cmd_orbit(args: argparse.Namespace) -> int:
    g = _read_graph(args.graph)
    _check_n(args, g.n, "graph")
    try:
        orbit = pivot_orbit(g, max_size=args.max_size, labeled=args.labeled, vertex_once=args.vertex_once)
    except SearchLimitError as exc:
        raise CliError(str(exc), EXIT_LIMIT) from None
    members = [
        {"digest": canonical_hash(m), "edges": [list(e) for e in m.edges()],
         "pivots": [list(p) for p in orbit.witness[k]]}
        for k, m in orbit.members.items()
    ]
    if args.format == "json":
        _emit(args, _dumps({"size": len(orbit), "truncated": orbit.truncated, "members": members}))
    else:
        lines = [f"orbit size {len(orbit)}" + (" (truncated)" if orbit.truncated else "")]
        lines += [f"{m['digest'][:16]} edges {m['edges']} via {m['pivots']}" for m in members]
        _emit(args, "\n".join(lines))
    return EXIT_OK


def cmd_minor(args: argparse.Namespace) -> int:
    g, h = _read_graph(args.g), _read_graph(args.h)
    _check_n(args, h.n, "host graph")
    try:
        res = is_pivot_minor(g, h, mode=args.mode, max_size=args.max_size, vertex_once=args.vertex_once)
    except SearchLimitError as exc:
        raise CliError(str(exc), EXIT_LIMIT) from None
    if res.found and not check_witness(g, h, res.witness):
        raise CliError("internal error: witness does not replay", EXIT_FAIL)
    verdict = {"yes": "pivot minor", "no": "not a pivot minor", "unknown": "unknown (orbit truncated)"}[res.status]
    if args.format == "json":
        _emit(args, _dumps({"status": res.status, "verdict": verdict, "orbit_size": res.orbit_size,
                            "witness": res.witness}))
    else:
        _emit(args, verdict + (f"; witness {_dumps(res.witness)}" if res.witness else ""))
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    max_n = args.max_n if args.max_n is not None else 4
    if max_n > 6:
        raise CliError("selftest sweeps every labelled graph; use --max-n <= 6", EXIT_LIMIT)
    tally = checks.sweep_exhaustive(max_n, seed=args.seed)
    gram = max((checks.gram_deviation(g) for n in range(1, max_n + 1) for g in all_graphs(n)), default=0.0)
    pairs, bad = checks.distinct_pairs_violations(min(max_n, 3))
    ok = tally.ok and gram < 1e-9 and bad == 0
    rules = sorted(set(tally.passed) | set(tally.failed))
    report = {
        "max_n": max_n,
        "rules": {r: [tally.passed[r], tally.passed[r] + tally.failed[r]] for r in rules},
        "gram_max_deviation": gram,
        "distinct_pairs_checked": pairs,
        "distinct_pairs_equivalent": bad,
        "failures": tally.examples,
        "ok": ok,
    }
    if args.format == "json":
        _emit(args, _dumps(report))
    else:
        lines = [f"{r}: {p}/{t} pass" for r, (p, t) in report["rules"].items()]
        lines.append(f"gram max deviation {gram:.3e}")
        lines.append(f"distinct pairs {pairs}, equivalent {bad}")
        lines += [f"FAIL {e}" for e in tally.examples]
        lines.append("selftest " + ("passed" if ok else "FAILED"))
        _emit(args, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _outcomes(text: str) -> str:
    if text in ("zero", "random") or (text.startswith("forced:") and set(text[7:]) <= {"0", "1"}):
        return text
    raise argparse.ArgumentTypeError("expected zero, random or forced:<bits>")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0, help="64-bit seed for every random choice")
    common.add_argument("--outcomes", type=_outcomes, default="zero", help="zero | random | forced:<bits>")
    common.add_argument("--max-n", type=int, default=None, help="refuse inputs with more vertices")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("-o", "--output", default=None, help="write here instead of stdout")

    parser = argparse.ArgumentParser(prog="pivotminor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a grid or path as an edge list")
    p.add_argument("kind", choices=GRID_KINDS)
    p.add_argument("--rows", type=int, default=1)
    p.add_argument("--cols", type=int, default=1)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("lc", parents=[common], help="local complementation (signed if the file has an S: line)")
    p.add_argument("graph")
    p.add_argument("u", type=int)
    p.set_defaults(func=cmd_lc)

    p = sub.add_parser("pivot", parents=[common], help="pivot on an edge (Hadamard pair on signed states)")
    p.add_argument("graph")
    p.add_argument("u", type=int)
    p.add_argument("v", type=int)
    p.set_defaults(func=cmd_pivot)

    p = sub.add_parser("measure", parents=[common], help="replay an X/Z measurement plan on a signed state")
    p.add_argument("state")
    p.add_argument("--x", help="X-measured vertices, comma or space separated")
    p.add_argument("--z", help="Z-measured vertices")
    p.add_argument("--plan", help="JSON file with x_set and z_set")
    p.add_argument("--strategy", choices=("lowest", "highest", "random"), default="lowest")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("compile", parents=[common], help="compile a graph onto a triangular grid")
    p.add_argument("graph")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", parents=[common], help="replay a compilation certificate")
    p.add_argument("compilation")
    p.add_argument("graph")
    p.add_argument("--strategy", choices=("lowest", "highest", "random"), default="lowest")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="simulate a pattern JSON on the dense oracle")
    p.add_argument("pattern")
    p.add_argument("--input", default="plus", help="'plus' or a bit string over the inputs")
    p.set_defaults(func=cmd_simulate)

    for name, helptext in (("orbit", "pivot orbit of a graph"), ("minor", "pivot-minor test")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "orbit":
            p.add_argument("graph")
            p.add_argument("--labeled", action="store_true", help="deduplicate labelled graphs")
            p.set_defaults(func=cmd_orbit)
        else:
            p.add_argument("g", help="candidate minor")
            p.add_argument("h", help="host graph")
            p.add_argument("--mode", choices=("labeled", "up_to_iso"), default="up_to_iso")
            p.set_defaults(func=cmd_minor)
        p.add_argument("--max-size", type=int, default=200_000)
        p.add_argument("--vertex-once", action="store_true", help="pivot on each vertex at most once")

    p = sub.add_parser("selftest", parents=[common], help="exhaustive rewrite-rule versus oracle sweep")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"pivotminor {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
