"""Command line driver: full compilation plus one subcommand per stage.

Exit status is 0 on success, 1 on a definite negative result (no matching
graph, no flow, a failed verification, search exhaustion), and 2 on
malformed input.
"""
from __future__ import annotations

import argparse
import math
import sys
from collections.abc import Sequence

import numpy as np

from . import serialize
from .core import QubitIndexing
from .driver import CompileConfig, compile_unitary
from .flow import NoFlowError, find_flow
from .graphmatch import NoMatchingGraphError, match_diagonal
from .pattern import synthesize, validate_pattern
from .phasemap import DecompositionPlan, SlotBoundError, enumerate_diagonal, verify_decomposition
from .sim import branch_maps, check_deterministic_and_equal


def _fmt_angle(a: float) -> str:
    """Angle in radians; exact multiples of pi/4 get a symbolic annotation."""
    quarter = round(a / (math.pi / 4))
    if abs(a - quarter * math.pi / 4) < 1e-12:
        return f"{a!r} (= {quarter}*pi/4)"
    return repr(a)


def _parse_labels(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise serialize.FormatError(f"{what}: expected comma-separated integers, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbqcompile",
        description="Compile unitaries into deterministic one-way measurement patterns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="full pipeline with backtracking search")
    p.add_argument("--unitary", required=True, help="unitary JSON file")
    p.add_argument("--plan", default=None, help="search plan JSON (flags override its fields)")
    p.add_argument("--aux", type=int, default=None, help="auxiliary qubit count (default 2*inputs)")
    p.add_argument("--max-aux", type=int, default=None, help="expand the space up to this many auxiliaries")
    p.add_argument("--outputs", default=None, help='explicit output labels, e.g. "3,5"')
    p.add_argument("--max-perms", type=int, default=None, help="combined candidate cap (default 10000)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="write the result bundle JSON here")

    p = sub.add_parser("decompose", help="assemble and verify one canonical diagonal")
    p.add_argument("--unitary", required=True)
    p.add_argument("--aux", type=int, default=None)
    p.add_argument("--outputs", default=None, help="default: the last k fresh labels")
    p.add_argument("--out", default=None, help="write the phase map JSON here")

    p = sub.add_parser("match", help="extract a graph and angles from a phase map")
    p.add_argument("--phasemap", required=True)
    p.add_argument("--outputs", required=True, help='output vertex labels, e.g. "3"')
    p.add_argument("--inputs", default=None, help="input labels (needed for --geometry-out)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default=None, help="write the match result JSON here")
    p.add_argument("--geometry-out", default=None, help="also write a geometry JSON here")

    p = sub.add_parser("flow", help="find a path cover and dependency order")
    p.add_argument("--geometry", required=True)
    p.add_argument("--out", default=None, help="write the flow JSON here")

    p = sub.add_parser("synth", help="synthesize the pattern for a geometry with flow")
    p.add_argument("--geometry", required=True)
    p.add_argument("--match", required=True, help="match result JSON carrying the angles")
    p.add_argument("--out", default=None, help="write the pattern JSON here")

    p = sub.add_parser("simulate", help="enumerate all measurement branches of a pattern")
    p.add_argument("--pattern", required=True)
    p.add_argument("--all-branches", action="store_true", help="include every branch matrix")
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="check a pattern against a unitary")
    p.add_argument("--pattern", required=True)
    p.add_argument("--unitary", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default=None, help="write the verification report JSON here")
    return parser


def _cmd_compile(args) -> int:
    U = serialize.unitary_from_dict(serialize.read_json(args.unitary))
    outputs = _parse_labels(args.outputs, "--outputs") if args.outputs else None
    aux, seed, max_perms = args.aux, args.seed, args.max_perms
    if args.plan:
        plan = serialize.plan_from_dict(serialize.read_json(args.plan))
        if plan["inputs"] != list(range(1, U.num_qubits + 1)):
            raise serialize.FormatError(
                f"plan inputs {plan['inputs']} must be 1..{U.num_qubits} for this unitary"
            )
        outputs = outputs if outputs is not None else plan["outputs"]
        aux = aux if aux is not None else plan["aux"]
        seed = seed if seed is not None else plan["perm_seed"]
        max_perms = max_perms if max_perms is not None else plan["max_trials"]
    cfg = CompileConfig(
        aux=aux,
        max_aux=args.max_aux,
        outputs=tuple(outputs) if outputs is not None else None,
        max_perm_trials=max_perms if max_perms is not None else 10_000,
        seed=seed if seed is not None else 0,
        tol=args.tol,
    )
    result = compile_unitary(U, cfg)
    if result.success:
        print(f"compiled: {len(result.geometry.vertices)} qubits, aux={result.aux}, "
              f"outputs={sorted(result.geometry.outputs)}, trials={result.stats.trials}")
        print(f"edges: {[list(e) for e in result.match.edges]}")
        for v, a in sorted(result.match.angles.items()):
            print(f"angle[{v}] = {_fmt_angle(a)}")
        print(f"deterministic: {result.verification.deterministic}, "
              f"matches: {result.verification.matches_unitary}")
        if args.out:
            serialize.write_json(args.out, serialize.bundle_to_dict(result))
        return 0
    print("exhausted: no deterministic pattern found")
    print(f"classification: {result.classify()}")
    print(f"trials: {result.stats.trials}")
    for name, count in result.stats.failures.items():
        print(f"failed at {name}: {count}")
    if result.stats.caps_hit:
        print(f"caps hit: {', '.join(result.stats.caps_hit)}")
    if args.out:
        serialize.write_json(args.out, serialize.exhaustion_to_dict(result))
    return 1


def _cmd_decompose(args) -> int:
    U = serialize.unitary_from_dict(serialize.read_json(args.unitary))
    k = U.num_qubits
    n = args.aux if args.aux is not None else 2 * k
    vertices = tuple(range(1, k + n + 1))
    outputs = _parse_labels(args.outputs, "--outputs") if args.outputs else vertices[-k:]
    indexing = QubitIndexing(vertices, range(1, k + 1), outputs)
    try:
        phi = enumerate_diagonal(U, DecompositionPlan(indexing))
    except SlotBoundError as exc:
        print(f"no decomposition at this width: {exc}")
        return 1
    ok = verify_decomposition(U, phi, indexing)
    print(f"qubits: {len(vertices)}, outputs: {sorted(outputs)}")
    print(f"decomposition verified: {str(ok).lower()}")
    if args.out:
        serialize.write_json(args.out, serialize.phase_map_to_dict(phi))
    return 0 if ok else 1


def _cmd_match(args) -> int:
    phi = serialize.phase_map_from_dict(serialize.read_json(args.phasemap))
    vertices = tuple(range(1, phi.num_qubits + 1))
    outputs = _parse_labels(args.outputs, "--outputs")
    inputs = _parse_labels(args.inputs, "--inputs") if args.inputs else ()
    indexing = QubitIndexing(vertices, inputs, outputs)
    try:
        result = match_diagonal(phi, indexing, tol=args.tol)
    except NoMatchingGraphError as exc:
        print(f"no matching graph: {exc}")
        return 1
    print(f"edges: {[list(e) for e in result.edges]}")
    for v, a in sorted(result.angles.items()):
        print(f"angle[{v}] = {_fmt_angle(a)}")
    if args.out:
        serialize.write_json(args.out, serialize.match_to_dict(result))
    if args.geometry_out:
        if not inputs:
            raise serialize.FormatError("--geometry-out requires --inputs")
        from .flow import Geometry

        geometry = Geometry(vertices, result.edges, inputs, outputs)
        serialize.write_json(args.geometry_out, serialize.geometry_to_dict(geometry))
    return 0


def _cmd_flow(args) -> int:
    g = serialize.geometry_from_dict(serialize.read_json(args.geometry))
    try:
        flow = find_flow(g)
    except NoFlowError as exc:
        print(f"no flow: {exc}")
        return 1
    print(f"paths: {[list(p) for p in flow.cover.paths]}")
    print(f"f: { {x: y for x, y in sorted(flow.successor.items())} }")
    if args.out:
        serialize.write_json(args.out, serialize.flow_to_dict(flow))
    return 0


def _cmd_synth(args) -> int:
    g = serialize.geometry_from_dict(serialize.read_json(args.geometry))
    match = serialize.match_from_dict(serialize.read_json(args.match))
    try:
        flow = find_flow(g)
    except NoFlowError as exc:
        print(f"no flow: {exc}")
        return 1
    pattern = synthesize(g, flow, match.angles)
    report = validate_pattern(pattern)
    print(f"commands: {len(pattern.commands)}, valid: {str(report.ok).lower()}")
    if args.out:
        serialize.write_json(args.out, serialize.pattern_to_dict(pattern))
    return 0


def _cmd_simulate(args) -> int:
    pattern = serialize.pattern_from_dict(serialize.read_json(args.pattern))
    branches = branch_maps(pattern)
    positive = branches[0].matrix
    discrepancy = max(
        (float(np.max(np.abs(b.matrix - positive))) for b in branches[1:]), default=0.0
    )
    print(f"branches: {len(branches)}")
    print(f"max branch discrepancy: {discrepancy:.3e}")
    print(f"deterministic: {str(discrepancy < 1e-9).lower()}")
    if args.out:
        payload = {
            "num_branches": len(branches),
            "max_branch_discrepancy": discrepancy,
            "deterministic": discrepancy < 1e-9,
        }
        if args.all_branches:
            payload["branches"] = [
                {
                    "outcomes": b.outcomes,
                    "matrix": [[serialize._pair(z) for z in row] for row in b.matrix],
                }
                for b in branches
            ]
        serialize.write_json(args.out, payload)
    return 0


def _cmd_verify(args) -> int:
    pattern = serialize.pattern_from_dict(serialize.read_json(args.pattern))
    U = serialize.unitary_from_dict(serialize.read_json(args.unitary))
    report = check_deterministic_and_equal(pattern, U, tol=args.tol)
    print(f"deterministic: {str(report.deterministic).lower()}")
    print(f"matches: {str(report.matches_unitary).lower()}")
    if args.out:
        serialize.write_json(args.out, serialize.report_to_dict(report))
    return 0 if report.deterministic and report.matches_unitary else 1


_COMMANDS = {
    "compile": _cmd_compile,
    "decompose": _cmd_decompose,
    "match": _cmd_match,
    "flow": _cmd_flow,
    "synth": _cmd_synth,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (serialize.FormatError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:  # console script hook
    sys.exit(main())
