"""JSON formats for every pipeline artifact, plus canonical file writing.

Complex numbers are ``[re, im]`` pairs.  Floats (angles included) go through
Python's shortest round-trip repr, which is exact to 17 significant digits,
and files are written with sorted keys and a trailing newline so equal
inputs produce byte-identical artifacts.
"""
from __future__ import annotations

import json
from pathlib import Path
from collections.abc import Mapping

import numpy as np

from .core import PhaseMapDiagonal, UnitaryMatrix
from .driver import CompileSuccess, ExhaustionReport
from .flow import FlowResult, Geometry
from .graphmatch import MatchResult
from .pattern import CorrectX, CorrectZ, Entangle, Measure, Pattern, Prep
from .sim import VerificationReport


class FormatError(ValueError):
    """The JSON payload does not have the expected structure."""


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _unpair(obj, what: str) -> complex:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise FormatError(f"{what}: expected a [re, im] pair, got {obj!r}")
    re, im = obj
    if not isinstance(re, (int, float)) or not isinstance(im, (int, float)):
        raise FormatError(f"{what}: expected numeric re/im, got {obj!r}")
    return complex(re, im)


def _require(d: Mapping, key: str, what: str):
    if not isinstance(d, Mapping) or key not in d:
        raise FormatError(f"{what}: missing key {key!r}")
    return d[key]


def _int_list(obj, what: str) -> list[int]:
    if not isinstance(obj, list) or not all(isinstance(v, int) for v in obj):
        raise FormatError(f"{what}: expected a list of integers, got {obj!r}")
    return list(obj)


def _int(obj, what: str) -> int:
    if not isinstance(obj, int) or isinstance(obj, bool):
        raise FormatError(f"{what}: expected an integer, got {obj!r}")
    return obj


# -- unitary -----------------------------------------------------------------


def unitary_to_dict(U: UnitaryMatrix) -> dict:
    return {
        "num_qubits": U.num_qubits,
        "matrix": [[_pair(z) for z in row] for row in U.entries],
    }


def unitary_from_dict(d: Mapping) -> UnitaryMatrix:
    k = _require(d, "num_qubits", "unitary")
    rows = _require(d, "matrix", "unitary")
    if not isinstance(k, int) or not isinstance(rows, list):
        raise FormatError("unitary: num_qubits must be an int and matrix a list of rows")
    matrix = np.array(
        [[_unpair(z, "unitary matrix entry") for z in row] for row in rows], dtype=complex
    )
    try:
        return UnitaryMatrix(k, matrix)
    except ValueError as exc:
        raise FormatError(f"unitary: {exc}") from exc


# -- phase map ---------------------------------------------------------------


def phase_map_to_dict(phi: PhaseMapDiagonal) -> dict:
    return {"num_qubits": phi.num_qubits, "diagonal": [_pair(z) for z in phi.diagonal]}


def phase_map_from_dict(d: Mapping) -> PhaseMapDiagonal:
    k = _require(d, "num_qubits", "phase map")
    diag = _require(d, "diagonal", "phase map")
    if not isinstance(k, int) or not isinstance(diag, list):
        raise FormatError("phase map: num_qubits must be an int and diagonal a list")
    values = np.array([_unpair(z, "phase map entry") for z in diag], dtype=complex)
    try:
        return PhaseMapDiagonal(k, values)
    except ValueError as exc:
        raise FormatError(f"phase map: {exc}") from exc


# -- geometry ----------------------------------------------------------------


def geometry_to_dict(g: Geometry) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [list(e) for e in g.edges],
        "inputs": sorted(g.inputs),
        "outputs": sorted(g.outputs),
    }


def geometry_from_dict(d: Mapping) -> Geometry:
    vertices = _int_list(_require(d, "vertices", "geometry"), "geometry vertices")
    raw_edges = _require(d, "edges", "geometry")
    if not isinstance(raw_edges, list):
        raise FormatError("geometry: edges must be a list of pairs")
    edges = []
    for e in raw_edges:
        pair = _int_list(e, "geometry edge")
        if len(pair) != 2:
            raise FormatError(f"geometry: edge {e!r} is not a pair")
        edges.append((pair[0], pair[1]))
    inputs = _int_list(_require(d, "inputs", "geometry"), "geometry inputs")
    outputs = _int_list(_require(d, "outputs", "geometry"), "geometry outputs")
    try:
        return Geometry(vertices, edges, inputs, outputs)
    except ValueError as exc:
        raise FormatError(f"geometry: {exc}") from exc


# -- graph match result ------------------------------------------------------


def match_to_dict(m: MatchResult) -> dict:
    return {
        "edges": [list(e) for e in m.edges],
        "angles": {str(v): float(a) for v, a in sorted(m.angles.items())},
    }


def match_from_dict(d: Mapping) -> MatchResult:
    raw_edges = _require(d, "edges", "match result")
    raw_angles = _require(d, "angles", "match result")
    if not isinstance(raw_edges, list) or not isinstance(raw_angles, Mapping):
        raise FormatError("match result: expected edges list and angles mapping")
    edges = []
    for e in raw_edges:
        pair = _int_list(e, "match edge")
        if len(pair) != 2:
            raise FormatError(f"match result: edge {e!r} is not a pair")
        edges.append((pair[0], pair[1]))
    angles = {}
    for key, val in raw_angles.items():
        try:
            vertex = int(key)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"match result: angle key {key!r} is not a vertex") from exc
        if not isinstance(val, (int, float)):
            raise FormatError(f"match result: angle for {key} must be a number")
        angles[vertex] = float(val)
    return MatchResult(tuple(edges), angles)


# -- flow --------------------------------------------------------------------


def flow_to_dict(flow: FlowResult) -> dict:
    sup = {
        str(v): {str(t): s for t, s in enumerate(row)}
        for v, row in sorted(flow.order.sup.items())
    }
    return {
        "f": {str(x): y for x, y in sorted(flow.successor.items())},
        "order_chains": [list(p) for p in flow.cover.paths],
        "sup": sup,
    }


# -- pattern -----------------------------------------------------------------


def pattern_to_dict(p: Pattern) -> dict:
    commands = []
    for cmd in p.commands:
        if isinstance(cmd, Prep):
            commands.append({"op": "N", "q": cmd.qubit})
        elif isinstance(cmd, Entangle):
            commands.append({"op": "E", "q": list(cmd.pair)})
        elif isinstance(cmd, Measure):
            commands.append({"op": "M", "q": cmd.qubit, "angle": float(cmd.angle)})
        elif isinstance(cmd, CorrectX):
            commands.append({"op": "X", "q": cmd.qubit, "signal": cmd.signal})
        else:
            commands.append({"op": "Z", "q": cmd.qubit, "signal": cmd.signal})
    return {
        "space": list(p.space),
        "inputs": sorted(p.inputs),
        "outputs": sorted(p.outputs),
        "commands": commands,
    }


def pattern_from_dict(d: Mapping) -> Pattern:
    space = _int_list(_require(d, "space", "pattern"), "pattern space")
    inputs = _int_list(_require(d, "inputs", "pattern"), "pattern inputs")
    outputs = _int_list(_require(d, "outputs", "pattern"), "pattern outputs")
    raw = _require(d, "commands", "pattern")
    if not isinstance(raw, list):
        raise FormatError("pattern: commands must be a list")
    commands = []
    for c in raw:
        if not isinstance(c, Mapping) or "op" not in c:
            raise FormatError(f"pattern: bad command {c!r}")
        op = c["op"]
        if op == "N":
            commands.append(Prep(_int(_require(c, "q", "N command"), "N command qubit")))
        elif op == "E":
            pair = _int_list(_require(c, "q", "E command"), "E command qubits")
            if len(pair) != 2:
                raise FormatError(f"pattern: E command pair {pair!r} is not a pair")
            commands.append(Entangle((pair[0], pair[1])))
        elif op == "M":
            q = _int(_require(c, "q", "M command"), "M command qubit")
            angle = _require(c, "angle", "M command")
            if not isinstance(angle, (int, float)):
                raise FormatError("pattern: M command angle must be a number")
            commands.append(Measure(q, float(angle)))
        elif op == "X":
            commands.append(
                CorrectX(
                    _int(_require(c, "q", "X command"), "X command qubit"),
                    _int(_require(c, "signal", "X command"), "X command signal"),
                )
            )
        elif op == "Z":
            commands.append(
                CorrectZ(
                    _int(_require(c, "q", "Z command"), "Z command qubit"),
                    _int(_require(c, "signal", "Z command"), "Z command signal"),
                )
            )
        else:
            raise FormatError(f"pattern: unknown op {op!r}")
    try:
        return Pattern(space, inputs, outputs, commands)
    except ValueError as exc:
        raise FormatError(f"pattern: {exc}") from exc


# -- search plan -------------------------------------------------------------


def plan_to_dict(
    inputs: list[int],
    outputs: list[int] | None,
    aux: int | None,
    perm_seed: int,
    max_trials: int,
) -> dict:
    payload: dict = {"inputs": list(inputs), "perm_seed": perm_seed, "max_trials": max_trials}
    if outputs is not None:
        payload["outputs"] = list(outputs)
    if aux is not None:
        payload["aux"] = aux
    return payload


def plan_from_dict(d: Mapping) -> dict:
    """Search plan: declared inputs plus optional outputs/aux and search knobs."""
    inputs = _int_list(_require(d, "inputs", "plan"), "plan inputs")
    out: dict = {"inputs": inputs, "outputs": None, "aux": None, "perm_seed": 0, "max_trials": None}
    if "outputs" in d:
        out["outputs"] = _int_list(d["outputs"], "plan outputs")
    if "aux" in d:
        if not isinstance(d["aux"], int) or d["aux"] < 1:
            raise FormatError("plan: aux must be a positive integer")
        out["aux"] = d["aux"]
    if "perm_seed" in d:
        if not isinstance(d["perm_seed"], int):
            raise FormatError("plan: perm_seed must be an integer")
        out["perm_seed"] = d["perm_seed"]
    if "max_trials" in d:
        if not isinstance(d["max_trials"], int) or d["max_trials"] < 1:
            raise FormatError("plan: max_trials must be a positive integer")
        out["max_trials"] = d["max_trials"]
    return out


# -- reports and bundles -----------------------------------------------------


def report_to_dict(r: VerificationReport) -> dict:
    return r.to_dict()


def stats_to_dict(stats) -> dict:
    return {
        "trials": stats.trials,
        "failures": dict(stats.failures),
        "caps_hit": list(stats.caps_hit),
    }


def bundle_to_dict(result: CompileSuccess) -> dict:
    return {
        "aux": result.aux,
        "phase_map": phase_map_to_dict(result.phase_map),
        "match": match_to_dict(result.match),
        "geometry": geometry_to_dict(result.geometry),
        "flow": flow_to_dict(result.flow),
        "pattern": pattern_to_dict(result.pattern),
        "verification": report_to_dict(result.verification),
        "search": stats_to_dict(result.stats),
    }


def exhaustion_to_dict(report: ExhaustionReport) -> dict:
    return {
        "success": False,
        "classification": report.classify(),
        "search": stats_to_dict(report.stats),
    }


# -- files -------------------------------------------------------------------


def write_json(path: str | Path, payload: dict) -> None:
    """Canonical dump: sorted keys, two-space indent, trailing newline."""
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def read_json(path: str | Path) -> dict:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise FormatError(f"{path}: expected a JSON object at top level")
    return payload
