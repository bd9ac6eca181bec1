"""Dense statevector execution of patterns and exhaustive branch enumeration.

Measurements are destructive: projecting qubit ``i`` removes it from the
state (the array halves), and nothing renormalizes, so a branch's squared
norm is its probability.  Outcome 0 projects onto ``<0| + e^{-ia} <1|``
(scaled by ``2**-0.5``), outcome 1 onto the orthogonal functional.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from collections.abc import Mapping, Sequence

import numpy as np

from .core import MATRIX_TOL, PhaseMapDiagonal, QubitIndexing, StateVector, UnitaryMatrix
from .flow import Geometry
from .pattern import CorrectX, CorrectZ, Entangle, Measure, Pattern, Prep, validate_pattern

DEFAULT_MAX_QUBITS = 20
DEFAULT_MAX_MEASURED = 12

_SQRT2_INV = 2.0**-0.5


@dataclass(frozen=True, eq=False)
class BranchMap:
    """The linear input-to-output map realized along one outcome assignment.

    ``outcomes`` lists the forced measurement results in measurement order;
    the matrix is un-normalized (its operator norm carries the branch
    probability).
    """

    outcomes: str
    matrix: np.ndarray


def _normalize_outcomes(outcomes: Sequence[int] | str, count: int) -> tuple[int, ...]:
    bits = tuple(int(b) for b in outcomes)
    if len(bits) != count or any(b not in (0, 1) for b in bits):
        raise ValueError(f"expected {count} outcome bits, got {outcomes!r}")
    return bits


def run_branch(p: Pattern, input_state: StateVector, outcomes: Sequence[int] | str) -> StateVector:
    """Execute the pattern on ``input_state`` with forced measurement outcomes.

    Returns the un-normalized state over the output qubits.
    """
    report = validate_pattern(p)
    if not report.ok:
        raise ValueError(f"invalid pattern: {report.message}")
    indexing = p.indexing()
    if input_state.qubit_labels != indexing.input_list:
        raise ValueError(
            f"input state is over {input_state.qubit_labels}, expected {indexing.input_list}"
        )
    bits = _normalize_outcomes(outcomes, len(p.measured_qubits))
    forced = dict(zip(p.measured_qubits, bits))

    labels = list(indexing.input_list)
    state = input_state.amplitudes.reshape((2,) * len(labels)).copy()
    plus = np.array([_SQRT2_INV, _SQRT2_INV], dtype=complex)
    outcome_of: dict[int, int] = {}

    for cmd in p.commands:
        if isinstance(cmd, Prep):
            pos = int(np.searchsorted(labels, cmd.qubit))
            labels.insert(pos, cmd.qubit)
            state = np.moveaxis(np.tensordot(state, plus, axes=0), -1, pos)
        elif isinstance(cmd, Entangle):
            a, b = (labels.index(q) for q in cmd.pair)
            sel: list = [slice(None)] * state.ndim
            sel[a] = 1
            sel[b] = 1
            state[tuple(sel)] *= -1.0
        elif isinstance(cmd, Measure):
            pos = labels.index(cmd.qubit)
            s = forced[cmd.qubit]
            sign = 1.0 if s == 0 else -1.0
            bra1 = sign * np.exp(-1j * cmd.angle)
            state = _SQRT2_INV * (state.take(0, axis=pos) + bra1 * state.take(1, axis=pos))
            labels.pop(pos)
            outcome_of[cmd.qubit] = s
        elif isinstance(cmd, CorrectX):
            if outcome_of[cmd.signal]:
                state = np.flip(state, axis=labels.index(cmd.qubit))
        elif isinstance(cmd, CorrectZ):
            if outcome_of[cmd.signal]:
                sel = [slice(None)] * state.ndim
                sel[labels.index(cmd.qubit)] = 1
                state[tuple(sel)] *= -1.0
        else:  # pragma: no cover
            raise TypeError(f"unknown command {cmd!r}")
    return StateVector(labels, state.reshape(-1))


def branch_maps(
    p: Pattern,
    max_qubits: int = DEFAULT_MAX_QUBITS,
    max_measured: int = DEFAULT_MAX_MEASURED,
) -> list[BranchMap]:
    """All ``2**measured`` branch maps, columns computed by :func:`run_branch`.

    Branches are ordered by their outcome string read as a binary number, so
    the positive (all-zero) branch comes first.
    """
    if len(p.space) > max_qubits:
        raise ValueError(f"pattern has {len(p.space)} qubits, limit is {max_qubits}")
    measured = p.measured_qubits
    if len(measured) > max_measured:
        raise ValueError(f"pattern measures {len(measured)} qubits, limit is {max_measured}")
    report = validate_pattern(p)
    if not report.ok:
        raise ValueError(f"invalid pattern: {report.message}")
    indexing = p.indexing()
    dim_in = 2 ** len(indexing.input_list)
    dim_out = 2 ** len(indexing.output_list)
    out: list[BranchMap] = []
    for bits in itertools.product((0, 1), repeat=len(measured)):
        matrix = np.empty((dim_out, dim_in), dtype=complex)
        for q in range(dim_in):
            col = run_branch(p, StateVector.basis_state(indexing.input_list, q), bits)
            matrix[:, q] = col.amplitudes
        out.append(BranchMap("".join(map(str, bits)), matrix))
    return out


@dataclass(frozen=True)
class VerificationReport:
    """Branch-equality and unitary-equality summary for one pattern."""

    deterministic: bool
    max_branch_discrepancy: float
    matches_unitary: bool
    max_entry_error: float

    def to_dict(self) -> dict:
        return {
            "deterministic": self.deterministic,
            "max_branch_discrepancy": self.max_branch_discrepancy,
            "matches_unitary": self.matches_unitary,
            "max_entry_error": self.max_entry_error,
        }


def check_deterministic_and_equal(
    p: Pattern, U: UnitaryMatrix, tol: float = MATRIX_TOL
) -> VerificationReport:
    """Are all branch maps equal, and does the pattern realize ``U``?

    The positive branch scaled by ``2**(measured/2)`` is compared against
    ``U`` entrywise; branch discrepancy is measured against the positive
    branch.  Both checks must pass for the compiler to accept a pattern.
    """
    branches = branch_maps(p)
    positive = branches[0].matrix
    if positive.shape != U.entries.shape:
        raise ValueError(f"pattern maps {positive.shape[1]} -> {positive.shape[0]} amplitudes, unitary is {U.entries.shape}")
    discrepancy = 0.0
    for b in branches[1:]:
        discrepancy = max(discrepancy, float(np.max(np.abs(b.matrix - positive))))
    scale = 2.0 ** (len(p.measured_qubits) / 2.0)
    err = float(np.max(np.abs(scale * positive - U.entries)))
    return VerificationReport(
        deterministic=discrepancy < tol,
        max_branch_discrepancy=discrepancy,
        matches_unitary=err < tol,
        max_entry_error=err,
    )


def positive_branch_phase_map(g: Geometry, angles: Mapping[int, float]) -> PhaseMapDiagonal:
    """Diagonal of the entangle-then-rotate operator product for a geometry.

    Multiplies out, over the computational basis, a Z rotation by minus each
    measurement angle on every non-output qubit and a controlled-Z per edge.
    This is the inverse direction of graph matching: feeding the result back
    through extraction recovers the graph and angles.
    """
    indexing = QubitIndexing(g.vertices, g.inputs, g.outputs)
    missing = [j for j in g.non_outputs if j not in angles]
    if missing:
        raise ValueError(f"missing angles for non-output qubits {missing}")
    h = indexing.num_qubits
    ks = np.arange(2**h)
    diag = np.ones(2**h, dtype=complex)
    for j in g.non_outputs:
        bit = (ks >> (h - 1 - indexing.position(j))) & 1
        diag = diag * np.where(bit == 1, np.exp(-1j * float(angles[j])), 1.0)
    for a, b in g.edges:
        bit_a = (ks >> (h - 1 - indexing.position(a))) & 1
        bit_b = (ks >> (h - 1 - indexing.position(b))) & 1
        diag = diag * np.where(bit_a & bit_b == 1, -1.0, 1.0)
    return PhaseMapDiagonal(h, diag)
