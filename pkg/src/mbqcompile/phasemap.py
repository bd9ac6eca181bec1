"""Solving for unit-modulus slot coefficients and assembling phase map diagonals.

Writing ``k`` for the number of inputs and ``n`` for the number of auxiliary
qubits (``n = |V| - k``), each coefficient ``u`` of the target unitary is
spread over ``m = 2**(n-k)`` diagonal "slots".  The slot terms ``x`` must
satisfy two constraints:

* they sum to ``u`` (the restriction map adds them back up), and
* each has modulus ``2**(-n/2)`` (so the assembled diagonal entries,
  scaled by ``sqrt(2**n)``, are units).

Joint solutions exist iff ``|u| <= 2**(n/2 - k)``: view each term as a plane
vector of fixed length ``r = 2**(-n/2)``, align all of them with ``u``, then
rotate pairs at opposite angles until the excess length ``m*r - |u|`` is
eaten.  Each fully rotated pair (angles +-pi/2) cancels and removes ``2r``;
one final pair at +-theta removes the remainder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from collections.abc import Callable, Mapping

import numpy as np

from .core import MATRIX_TOL, PhaseMapDiagonal, QubitIndexing, UnitaryMatrix, decomposition_matrix

# Equation residuals for slot solutions (sum and per-term modulus).
EQUATION_TOL = 1e-12
# Slack for the existence bound |u| <= 2**(n/2 - k).
BOUND_TOL = 1e-12

ZERO_AXIS_DEFAULT = math.pi / 2


class SlotBoundError(ValueError):
    """No joint slot solution exists for the requested coefficient."""


@dataclass(frozen=True, eq=False)
class SlotSolution:
    """Slot terms for one unitary coefficient, validated on construction."""

    coefficient_index: tuple[int, int]
    aux_count: int
    target: complex
    terms: np.ndarray

    def __post_init__(self) -> None:
        terms = np.asarray(self.terms, dtype=complex).reshape(-1)
        terms.setflags(write=False)
        object.__setattr__(self, "terms", terms)
        r = 2.0 ** (-self.aux_count / 2.0)
        if np.max(np.abs(np.abs(terms) - r)) > EQUATION_TOL:
            raise ValueError("slot terms must all have modulus 2**(-n/2)")
        if abs(np.sum(terms) - self.target) > EQUATION_TOL:
            raise ValueError("slot terms must sum to the target coefficient")

    @property
    def num_slots(self) -> int:
        return len(self.terms)


def solve_slots(
    u: complex, n: int, num_inputs: int, zero_axis: float = ZERO_AXIS_DEFAULT
) -> np.ndarray:
    """Return ``2**(n - num_inputs)`` terms of modulus ``2**(-n/2)`` summing to ``u``.

    ``zero_axis`` fixes the free axis of the antipodal pairs when ``u == 0``
    (the constraints do not determine a phase there); the default points the
    pairs at +-pi/2 off the real axis.

    Raises :class:`SlotBoundError` when ``|u| > 2**(n/2 - num_inputs)``, or
    when there is a single slot and ``|u| != 2**(-n/2)``.
    """
    if num_inputs < 1:
        raise ValueError("num_inputs must be positive")
    if n < num_inputs:
        raise SlotBoundError(f"need at least {num_inputs} auxiliary qubits, got {n}")
    m = 2 ** (n - num_inputs)
    r = 2.0 ** (-n / 2.0)
    mag = abs(u)
    bound = m * r  # == 2**(n/2 - num_inputs)
    if mag > bound + BOUND_TOL:
        raise SlotBoundError(f"no joint solution: |u| = {mag:.6g} exceeds 2**(n/2-k) = {bound:.6g}")
    if m == 1:
        if abs(mag - r) > 1e-10:
            raise SlotBoundError(
                f"single slot requires |u| = 2**(-n/2) = {r:.6g} exactly, got {mag:.6g}"
            )
        return np.array([u * (r / mag)], dtype=complex)

    if mag <= EQUATION_TOL:
        phase = complex(math.cos(zero_axis), math.sin(zero_axis))
        terms = np.empty(m, dtype=complex)
        terms[0::2] = r * phase
        terms[1::2] = -r * phase
        return terms

    phase = u / mag
    terms = np.full(m, r * phase, dtype=complex)
    deficit = max(bound - mag, 0.0)
    full_pairs = min(int(deficit // (2 * r)), m // 2)
    remainder = max(deficit - full_pairs * 2 * r, 0.0)
    for j in range(full_pairs):
        terms[2 * j] *= 1j
        terms[2 * j + 1] *= -1j
    if remainder > 0.0 and full_pairs < m // 2:
        theta = math.acos(min(max(1.0 - remainder / (2 * r), -1.0), 1.0))
        rot = complex(math.cos(theta), math.sin(theta))
        terms[2 * full_pairs] *= rot
        terms[2 * full_pairs + 1] *= rot.conjugate()
    return terms


@dataclass(frozen=True)
class DecompositionPlan:
    """Index layout and per-coefficient slot permutations for one diagonal.

    ``slot_permutations`` maps a coefficient index ``(p, q)`` to a permutation
    of ``range(2**(n-k))``; missing coefficients use the identity.  Inputs and
    outputs must be disjoint: the slot bookkeeping reads the input, output and
    free bits of a basis index independently.
    """

    indexing: QubitIndexing
    slot_permutations: Mapping[tuple[int, int], tuple[int, ...]] | None = None

    def __post_init__(self) -> None:
        if self.indexing.inputs & self.indexing.outputs:
            raise ValueError("inputs and outputs must be disjoint")
        if len(self.indexing.inputs) != len(self.indexing.outputs):
            raise ValueError("input and output sets must have equal size")
        if self.aux_count < len(self.indexing.inputs):
            raise ValueError("need at least as many auxiliary qubits as inputs")
        m = self.num_slots
        for pq, perm in (self.slot_permutations or {}).items():
            if sorted(perm) != list(range(m)):
                raise ValueError(f"slot permutation for {pq} is not a permutation of range({m})")

    @property
    def aux_count(self) -> int:
        return self.indexing.num_qubits - len(self.indexing.inputs)

    @property
    def num_slots(self) -> int:
        return 2 ** (self.aux_count - len(self.indexing.inputs))

    def permutation_for(self, p: int, q: int) -> tuple[int, ...]:
        if self.slot_permutations is None:
            return tuple(range(self.num_slots))
        return self.slot_permutations.get((p, q), tuple(range(self.num_slots)))


def solve_all_slots(
    U: UnitaryMatrix,
    plan: DecompositionPlan,
    zero_axes: Mapping[tuple[int, int], float] | None = None,
) -> dict[tuple[int, int], SlotSolution]:
    """Canonical slot solutions for every coefficient of ``U`` under ``plan``.

    ``zero_axes`` optionally overrides the free pair axis per zero
    coefficient; see :func:`solve_slots`.
    """
    k = len(plan.indexing.inputs)
    if U.num_qubits != k:
        raise ValueError(f"unitary acts on {U.num_qubits} qubits, plan has {k} inputs")
    n = plan.aux_count
    out: dict[tuple[int, int], SlotSolution] = {}
    for p in range(U.dim):
        for q in range(U.dim):
            u = U.coefficient(p, q)
            axis = ZERO_AXIS_DEFAULT if zero_axes is None else zero_axes.get((p, q), ZERO_AXIS_DEFAULT)
            terms = solve_slots(u, n, k, zero_axis=axis)
            out[(p, q)] = SlotSolution((p, q), n, u, terms)
    return out


def entry_function(
    plan: DecompositionPlan, slots: Mapping[tuple[int, int], SlotSolution]
) -> Callable[[int], complex]:
    """On-demand diagonal accessor: basis index ``k`` to the entry ``d_kk``.

    Lets a consumer reject a candidate diagonal after reading only a few
    entries, without materializing all ``2**|V|`` of them.
    """
    idx = plan.indexing
    scale = 2.0 ** (plan.aux_count / 2.0)
    in_list, out_list, free_list = idx.input_list, idx.output_list, idx.free_vertices

    def entry(k: int) -> complex:
        p = idx.subset_index(k, out_list)
        q = idx.subset_index(k, in_list)
        slot = idx.subset_index(k, free_list)
        perm = plan.permutation_for(p, q)
        return complex(scale * slots[(p, q)].terms[perm[slot]])

    return entry


def enumerate_diagonal(
    U: UnitaryMatrix,
    plan: DecompositionPlan,
    slots: Mapping[tuple[int, int], SlotSolution] | None = None,
) -> PhaseMapDiagonal:
    """Assemble the full diagonal for ``U`` under ``plan``.

    Entry ``k`` is ``sqrt(2**n)`` times the slot term selected by the output
    bits ``p``, input bits ``q`` and permuted free bits of ``k``.
    """
    if slots is None:
        slots = solve_all_slots(U, plan)
    idx = plan.indexing
    m = plan.num_slots
    table = np.empty((U.dim, U.dim, m), dtype=complex)
    for (p, q), sol in slots.items():
        if sol.num_slots != m:
            raise ValueError(f"slot solution for {(p, q)} has {sol.num_slots} terms, expected {m}")
        table[p, q, :] = sol.terms[np.asarray(plan.permutation_for(p, q))]
    p_of_k = idx.subset_index_table(idx.output_list)
    q_of_k = idx.subset_index_table(idx.input_list)
    s_of_k = idx.subset_index_table(idx.free_vertices)
    scale = 2.0 ** (plan.aux_count / 2.0)
    return PhaseMapDiagonal(idx.num_qubits, scale * table[p_of_k, q_of_k, s_of_k])


def verify_decomposition(U: UnitaryMatrix, phi: PhaseMapDiagonal, indexing: QubitIndexing) -> bool:
    """True iff the assembled restriction/diagonal/preparation sandwich equals ``U``."""
    rebuilt = decomposition_matrix(indexing, phi)
    if rebuilt.shape != U.entries.shape:
        return False
    return bool(np.max(np.abs(rebuilt - U.entries)) < MATRIX_TOL)
