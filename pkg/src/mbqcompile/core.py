"""Shared domain types and the preparation / restriction linear maps.

Conventions used throughout the package:

* Qubits are named by distinct positive integer labels, not required to be
  contiguous.  All bit positions are derived from the sorted label order.
* The vertex with the smallest label is the MOST significant bit of a
  computational-basis index, so for labels (1, 2, 3) the basis state
  ``|x1 x2 x3>`` has index ``4*x1 + 2*x2 + x3``.
* States are plain dense complex vectors and are not kept normalized:
  projective measurements shrink the norm and nothing renormalizes.
"""
from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Iterable, Sequence

import numpy as np

# Construction-time checks use 1e-10; end-to-end matrix comparisons 1e-9
# (double precision accumulated over <= 2**20 terms).
UNITARITY_TOL = 1e-10
UNIT_MODULUS_TOL = 1e-10
MATRIX_TOL = 1e-9


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    a.setflags(write=False)
    return a


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Dense unitary on ``num_qubits`` qubits; unitarity checked on construction."""

    num_qubits: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = _as_readonly(self.entries)
        object.__setattr__(self, "entries", entries)
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be a positive integer")
        dim = 2**self.num_qubits
        if entries.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {entries.shape}")
        err = np.max(np.abs(entries @ entries.conj().T - np.eye(dim)))
        if err > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary (deviation {err:.3e})")

    @classmethod
    def from_matrix(cls, entries: np.ndarray) -> UnitaryMatrix:
        """Build from a square matrix, inferring the qubit count from its size."""
        entries = np.asarray(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("expected a square matrix")
        if not _is_power_of_two(entries.shape[0]):
            raise ValueError("matrix dimension must be a power of two")
        return cls(entries.shape[0].bit_length() - 1, entries)

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    def coefficient(self, p: int, q: int) -> complex:
        """Entry <p|U|q> in the computational basis."""
        return complex(self.entries[p, q])


@dataclass(frozen=True)
class QubitIndexing:
    """A qubit set ``V`` with declared input and output subsets.

    ``vertices`` is stored sorted; inputs and outputs may overlap unless a
    consumer says otherwise.
    """

    vertices: tuple[int, ...]
    inputs: frozenset[int]
    outputs: frozenset[int]

    def __init__(self, vertices: Iterable[int], inputs: Iterable[int], outputs: Iterable[int]):
        vs = tuple(sorted(vertices))
        if len(set(vs)) != len(vs):
            raise ValueError("vertex labels must be distinct")
        if any((not isinstance(v, (int, np.integer))) or v < 1 for v in vs):
            raise ValueError("vertex labels must be positive integers")
        ins, outs = frozenset(inputs), frozenset(outputs)
        if not ins <= set(vs) or not outs <= set(vs):
            raise ValueError("inputs and outputs must be subsets of the vertex set")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "inputs", ins)
        object.__setattr__(self, "outputs", outs)
        object.__setattr__(self, "_position", {v: i for i, v in enumerate(vs)})

    @property
    def num_qubits(self) -> int:
        return len(self.vertices)

    @property
    def input_list(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v in self.inputs)

    @property
    def output_list(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v in self.outputs)

    @property
    def non_inputs(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v not in self.inputs)

    @property
    def non_outputs(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v not in self.outputs)

    @property
    def free_vertices(self) -> tuple[int, ...]:
        """Vertices in neither ``inputs`` nor ``outputs``."""
        return tuple(v for v in self.vertices if v not in self.inputs and v not in self.outputs)

    def position(self, v: int) -> int:
        """Rank of ``v`` in sorted label order (0 = most significant bit)."""
        return self._position[v]

    def bit_of(self, k: int, v: int) -> int:
        """Bit of basis index ``k`` belonging to vertex ``v``."""
        return (k >> (self.num_qubits - 1 - self.position(v))) & 1

    def weight_one_index(self, v: int) -> int:
        """Basis index of the string with a single 1 at vertex ``v``."""
        return 1 << (self.num_qubits - 1 - self.position(v))

    def subset_index(self, k: int, subset: Sequence[int]) -> int:
        """Integer formed by the bits of ``k`` at ``subset`` (ascending labels, MSB first)."""
        out = 0
        for v in subset:
            out = (out << 1) | self.bit_of(k, v)
        return out

    def subset_index_table(self, subset: Sequence[int]) -> np.ndarray:
        """Vectorized :meth:`subset_index` over all ``2**num_qubits`` basis indices."""
        ks = np.arange(2**self.num_qubits)
        out = np.zeros_like(ks)
        for v in subset:
            out = (out << 1) | ((ks >> (self.num_qubits - 1 - self.position(v))) & 1)
        return out


@dataclass(frozen=True, eq=False)
class PhaseMapDiagonal:
    """Diagonal of a computational-basis phase map: ``2**num_qubits`` unit entries."""

    num_qubits: int
    diagonal: np.ndarray

    def __post_init__(self) -> None:
        diag = _as_readonly(self.diagonal).reshape(-1)
        object.__setattr__(self, "diagonal", diag)
        if len(diag) != 2**self.num_qubits:
            raise ValueError(f"diagonal length {len(diag)} != 2**{self.num_qubits}")
        off = np.max(np.abs(np.abs(diag) - 1.0))
        if off > UNIT_MODULUS_TOL:
            raise ValueError(f"diagonal entries must have modulus 1 (deviation {off:.3e})")

    def entry(self, k: int) -> complex:
        return complex(self.diagonal[k])


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes over a set of labeled qubits.  Not necessarily normalized."""

    qubit_labels: tuple[int, ...]
    amplitudes: np.ndarray

    def __init__(self, qubit_labels: Iterable[int], amplitudes: np.ndarray):
        labels = tuple(qubit_labels)
        if list(labels) != sorted(set(labels)):
            raise ValueError("qubit labels must be strictly ascending")
        amps = _as_readonly(amplitudes).reshape(-1)
        if len(amps) != 2 ** len(labels):
            raise ValueError(f"amplitude length {len(amps)} != 2**{len(labels)}")
        object.__setattr__(self, "qubit_labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, qubit_labels: Iterable[int], index: int) -> StateVector:
        labels = tuple(qubit_labels)
        amps = np.zeros(2 ** len(labels), dtype=complex)
        amps[index] = 1.0
        return cls(labels, amps)

    @property
    def num_qubits(self) -> int:
        return len(self.qubit_labels)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def apply_preparation(state: StateVector, indexing: QubitIndexing) -> StateVector:
    """Tensor ``|+>`` onto every non-input qubit of ``indexing``.

    ``state`` must live exactly on the inputs; the result lives on all of
    ``V`` with the new qubits spliced in at their label-order bit positions.
    Norm is preserved.
    """
    if state.qubit_labels != indexing.input_list:
        raise ValueError(
            f"state is over {state.qubit_labels}, expected the inputs {indexing.input_list}"
        )
    aux = indexing.non_inputs
    scale = 2.0 ** (-len(aux) / 2.0)
    q_of_k = indexing.subset_index_table(indexing.input_list)
    return StateVector(indexing.vertices, scale * state.amplitudes[q_of_k])


def apply_restriction(state: StateVector, indexing: QubitIndexing) -> StateVector:
    """Project every non-output qubit onto ``<+|``.

    The adjoint of :func:`apply_preparation` with input and output roles
    swapped: each projected qubit contributes a factor ``2**-0.5``.
    """
    if state.qubit_labels != indexing.vertices:
        raise ValueError(
            f"state is over {state.qubit_labels}, expected all vertices {indexing.vertices}"
        )
    dropped = indexing.non_outputs
    scale = 2.0 ** (-len(dropped) / 2.0)
    p_of_k = indexing.subset_index_table(indexing.output_list)
    out = np.zeros(2 ** len(indexing.output_list), dtype=complex)
    np.add.at(out, p_of_k, state.amplitudes)
    return StateVector(indexing.output_list, scale * out)


def decomposition_matrix(indexing: QubitIndexing, phi: PhaseMapDiagonal) -> np.ndarray:
    """Matrix of restriction . diagonal . preparation, column by column.

    The restriction leg is applied unnormalized (``<0| + <1|`` per dropped
    qubit, i.e. scaled by ``2**(|O^c|/2)``) so that a diagonal which encodes
    a unitary reproduces that unitary at unit scale.  Returns a
    ``2**|O| x 2**|I|`` array.
    """
    if len(indexing.inputs) != len(indexing.outputs):
        raise ValueError("input and output sets must have equal size")
    if phi.num_qubits != indexing.num_qubits:
        raise ValueError(
            f"diagonal is over {phi.num_qubits} qubits, indexing has {indexing.num_qubits}"
        )
    n_in = len(indexing.inputs)
    n_out = len(indexing.outputs)
    scale = 2.0 ** ((indexing.num_qubits - n_out) / 2.0)
    out = np.empty((2**n_out, 2**n_in), dtype=complex)
    for q in range(2**n_in):
        col = StateVector.basis_state(indexing.input_list, q)
        full = apply_preparation(col, indexing)
        phased = StateVector(full.qubit_labels, phi.diagonal * full.amplitudes)
        out[:, q] = scale * apply_restriction(phased, indexing).amplitudes
    return out
