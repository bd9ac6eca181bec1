"""Measurement pattern synthesis from a geometry, flow, and angle assignment.

A pattern is a command sequence in application order (index 0 runs first)
over a qubit space with declared inputs and outputs: preparations of the
non-inputs, entanglers (controlled-Z) for the graph edges, destructive
measurements of the non-outputs, and Pauli corrections conditioned on
earlier measurement outcomes.
"""
from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Mapping

from .core import QubitIndexing
from .flow import FlowResult, Geometry, dependency_linear_extension


@dataclass(frozen=True)
class Prep:
    """Prepare qubit ``qubit`` in the plus state."""

    qubit: int


@dataclass(frozen=True)
class Entangle:
    """Apply controlled-Z between the two qubits of ``pair``."""

    pair: tuple[int, int]

    def __post_init__(self) -> None:
        a, b = self.pair
        if a == b:
            raise ValueError("cannot entangle a qubit with itself")
        object.__setattr__(self, "pair", (min(a, b), max(a, b)))


@dataclass(frozen=True)
class Measure:
    """Destructively measure ``qubit`` in the plus/minus basis rotated by ``angle``."""

    qubit: int
    angle: float


@dataclass(frozen=True)
class CorrectX:
    """Apply X to ``qubit`` when the outcome of measured qubit ``signal`` was 1."""

    qubit: int
    signal: int


@dataclass(frozen=True)
class CorrectZ:
    """Apply Z to ``qubit`` when the outcome of measured qubit ``signal`` was 1."""

    qubit: int
    signal: int


Command = Prep | Entangle | Measure | CorrectX | CorrectZ


def _touched(cmd: Command) -> tuple[int, ...]:
    if isinstance(cmd, Entangle):
        return cmd.pair
    return (cmd.qubit,)


@dataclass(frozen=True, eq=False)
class Pattern:
    """Command sequence over a qubit space with declared inputs and outputs."""

    space: tuple[int, ...]
    inputs: frozenset[int]
    outputs: frozenset[int]
    commands: tuple[Command, ...]

    def __init__(self, space, inputs, outputs, commands):
        object.__setattr__(self, "space", tuple(sorted(space)))
        object.__setattr__(self, "inputs", frozenset(inputs))
        object.__setattr__(self, "outputs", frozenset(outputs))
        object.__setattr__(self, "commands", tuple(commands))

    def indexing(self) -> QubitIndexing:
        return QubitIndexing(self.space, self.inputs, self.outputs)

    @property
    def measured_qubits(self) -> tuple[int, ...]:
        """Qubits in measurement order (the outcome bit-string order)."""
        return tuple(c.qubit for c in self.commands if isinstance(c, Measure))

    def measurement_angles(self) -> dict[int, float]:
        return {c.qubit: c.angle for c in self.commands if isinstance(c, Measure)}


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_pattern`; names the first violation, if any."""

    ok: bool
    condition: str | None = None
    command_index: int | None = None
    message: str | None = None


def validate_pattern(p: Pattern) -> ValidationReport:
    """Check the pattern definition conditions plus standard form.

    Conditions, in checking order per command: signals must refer to already
    measured qubits; no command may touch a measured or absent qubit;
    non-input qubits must be prepared before use.  Afterwards: exactly the
    non-inputs are prepared, exactly the non-outputs are measured, and all
    entanglers precede all measurements and corrections (standard form).
    """
    space = set(p.space)
    prepared: set[int] = set()
    measured: set[int] = set()
    past_entangling = False

    def fail(condition: str, index: int | None, message: str) -> ValidationReport:
        return ValidationReport(False, condition, index, message)

    for idx, cmd in enumerate(p.commands):
        if isinstance(cmd, (Measure, CorrectX, CorrectZ)):
            past_entangling = True
        elif isinstance(cmd, Entangle) and past_entangling:
            return fail(
                "standard-form",
                idx,
                f"entangler at {idx} follows a measurement or correction",
            )
        for q in _touched(cmd):
            if q not in space:
                return fail("acts-on-absent", idx, f"command {idx} touches unknown qubit {q}")
            if q in measured:
                return fail("acts-on-measured", idx, f"command {idx} acts on measured qubit {q}")
        if isinstance(cmd, Prep):
            if cmd.qubit in p.inputs:
                return fail("prepared-set", idx, f"input qubit {cmd.qubit} must not be prepared")
            if cmd.qubit in prepared:
                return fail("prepared-set", idx, f"qubit {cmd.qubit} prepared twice")
            prepared.add(cmd.qubit)
            continue
        for q in _touched(cmd):
            if q not in p.inputs and q not in prepared:
                return fail("acts-on-unprepared", idx, f"command {idx} uses unprepared qubit {q}")
        if isinstance(cmd, (CorrectX, CorrectZ)) and cmd.signal not in measured:
            return fail(
                "dependency-order",
                idx,
                f"command {idx} depends on qubit {cmd.signal} which is not yet measured",
            )
        if isinstance(cmd, Measure):
            if cmd.qubit in p.outputs:
                return fail("measured-set", idx, f"output qubit {cmd.qubit} must not be measured")
            measured.add(cmd.qubit)

    missing_prep = sorted(set(q for q in p.space if q not in p.inputs) - prepared)
    if missing_prep:
        return fail("prepared-set", None, f"non-input qubits never prepared: {missing_prep}")
    missing_meas = sorted(set(q for q in p.space if q not in p.outputs) - measured)
    if missing_meas:
        return fail("measured-set", None, f"non-output qubits never measured: {missing_meas}")
    return ValidationReport(True)


def synthesize(g: Geometry, flow: FlowResult, angles: Mapping[int, float]) -> Pattern:
    """Emit the deterministic pattern for a geometry with the given flow.

    In application order: prepare the non-inputs, entangle every edge, then
    measure the non-outputs along a linear extension of the dependency order.
    Right after measuring ``i``, condition on its outcome a Z on every
    neighbor of the successor ``f(i)`` other than ``i`` itself, and an X on
    ``f(i)``.
    """
    f = flow.cover.successor
    non_outputs = [v for v in g.vertices if v not in g.outputs]
    missing = [v for v in non_outputs if v not in angles]
    if missing:
        raise ValueError(f"missing measurement angles for non-output qubits {missing}")
    covered = {v for path in flow.cover.paths for v in path}
    if covered != set(g.vertices):
        raise ValueError("flow does not belong to this geometry")
    edge_set = set(g.edges)
    for x, y in flow.cover.arcs():
        if (min(x, y), max(x, y)) not in edge_set:
            raise ValueError(f"flow step {x}->{y} is not an edge of the geometry")

    commands: list[Command] = []
    for v in g.non_inputs:
        commands.append(Prep(v))
    for a, b in g.edges:
        commands.append(Entangle((a, b)))
    order = dependency_linear_extension(g, flow.cover)
    for i in order:
        if i in g.outputs:
            continue
        fi = f[i]
        commands.append(Measure(i, float(angles[i])))
        for k in g.neighbors(fi):
            if k != i:
                commands.append(CorrectZ(k, i))
        commands.append(CorrectX(fi, i))
    return Pattern(g.vertices, g.inputs, g.outputs, commands)
