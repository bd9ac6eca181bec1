"""Extracting an entanglement graph and measurement angles from a phase map.

A diagonal ``d`` implements a graph-plus-angles phase map exactly when, for
every basis string ``x``,

    d_x = exp(-i * sum_j angle_j * x_j) * (-1)**(sum_{jk in E} x_j * x_k)

with the sum of angles running over non-output qubits (output qubits carry
angle 0).  Weight-1 strings pin the angles and weight-2 strings pin the
edges, so extraction reads only O(|V|^2) entries; but those low-weight
constraints are necessary, not sufficient, so a full pass over all ``2**|V|``
entries is required before trusting the result.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from collections.abc import Callable, Mapping

import numpy as np

from .core import PhaseMapDiagonal, QubitIndexing

MATCH_TOL = 1e-9

EntrySource = PhaseMapDiagonal | Callable[[int], complex]


class NoMatchingGraphError(Exception):
    """The diagonal is not implemented by any graph and angle assignment."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass(frozen=True)
class MatchResult:
    """Extracted entanglement graph edges and per-qubit measurement angles.

    ``angles`` is defined exactly on the non-output qubits; output qubits
    implicitly carry angle 0.  Edges are stored as sorted pairs in sorted
    order.
    """

    edges: tuple[tuple[int, int], ...]
    angles: dict[int, float]

    def __post_init__(self) -> None:
        canon = tuple(sorted((min(a, b), max(a, b)) for a, b in self.edges))
        if any(a == b for a, b in canon):
            raise ValueError("self-loops are not allowed")
        object.__setattr__(self, "edges", canon)


def _entry_accessor(phi: EntrySource, indexing: QubitIndexing) -> Callable[[int], complex]:
    if isinstance(phi, PhaseMapDiagonal):
        if phi.num_qubits != indexing.num_qubits:
            raise ValueError(
                f"diagonal is over {phi.num_qubits} qubits, indexing has {indexing.num_qubits}"
            )
        return phi.entry
    return phi


def extract_angles(
    phi: EntrySource, indexing: QubitIndexing, tol: float = MATCH_TOL
) -> dict[int, float]:
    """Read angles off the weight-1 diagonal entries, in [0, 2*pi).

    The all-zero entry and every output qubit's weight-1 entry must equal 1;
    otherwise no graph matches and :class:`NoMatchingGraphError` is raised.
    """
    entry = _entry_accessor(phi, indexing)
    if abs(entry(0) - 1.0) > tol:
        raise NoMatchingGraphError("angles", f"all-zero entry is {entry(0):.6g}, expected 1")
    angles: dict[int, float] = {}
    for v in indexing.vertices:
        d = entry(indexing.weight_one_index(v))
        if v in indexing.outputs:
            if abs(d - 1.0) > tol:
                raise NoMatchingGraphError(
                    "angles", f"output qubit {v} has weight-1 entry {d:.6g}, expected 1"
                )
        else:
            angles[v] = (-math.atan2(d.imag, d.real)) % (2 * math.pi)
    return angles


def extract_edges(
    phi: EntrySource,
    indexing: QubitIndexing,
    angles: Mapping[int, float],
    tol: float = MATCH_TOL,
) -> tuple[tuple[int, int], ...]:
    """Decide every vertex pair from its weight-2 entry.

    The entry must be ``+-exp(-i*(angle_j + angle_k))``: minus means an edge,
    plus means none, anything else aborts immediately (pairs are checked in
    lexicographic order so a bad diagonal fails before being fully read).
    """
    entry = _entry_accessor(phi, indexing)
    edges: list[tuple[int, int]] = []
    for j, k in itertools.combinations(indexing.vertices, 2):
        d = entry(indexing.weight_one_index(j) | indexing.weight_one_index(k))
        target = np.exp(-1j * (angles.get(j, 0.0) + angles.get(k, 0.0)))
        if abs(d + target) < tol:
            edges.append((j, k))
        elif abs(d - target) > tol:
            raise NoMatchingGraphError(
                "edges", f"pair ({j},{k}) entry {d:.6g} is not +-exp(-i(a_{j}+a_{k}))"
            )
    return tuple(edges)


def verify_full(
    phi: EntrySource, result: MatchResult, indexing: QubitIndexing, tol: float = MATCH_TOL
) -> bool:
    """Check the graph/angle form of the diagonal on all ``2**|V|`` strings.

    The low-weight checks behind :func:`extract_angles` and
    :func:`extract_edges` do not constrain higher-weight entries, and a
    general diagonal of units need not factor, so this pass is mandatory
    before the result is sound.
    """
    h = indexing.num_qubits
    ks = np.arange(2**h)
    if isinstance(phi, PhaseMapDiagonal):
        if phi.num_qubits != h:
            raise ValueError(f"diagonal is over {phi.num_qubits} qubits, indexing has {h}")
        diag = phi.diagonal
    else:
        diag = np.array([phi(int(k)) for k in ks], dtype=complex)
    phase = np.zeros(2**h, dtype=float)
    for j, a in result.angles.items():
        phase += a * ((ks >> (h - 1 - indexing.position(j))) & 1)
    parity = np.zeros(2**h, dtype=np.int64)
    for j, k in result.edges:
        parity += ((ks >> (h - 1 - indexing.position(j))) & 1) * (
            (ks >> (h - 1 - indexing.position(k))) & 1
        )
    predicted = np.exp(-1j * phase) * np.where(parity % 2 == 1, -1.0, 1.0)
    return bool(np.max(np.abs(diag - predicted)) < tol)


def match_diagonal(
    phi: EntrySource, indexing: QubitIndexing, tol: float = MATCH_TOL
) -> MatchResult:
    """Extract angles and edges and run the full verification pass.

    Raises :class:`NoMatchingGraphError` if any stage fails.
    """
    angles = extract_angles(phi, indexing, tol=tol)
    edges = extract_edges(phi, indexing, angles, tol=tol)
    result = MatchResult(edges, angles)
    if not verify_full(phi, result, indexing, tol=tol):
        raise NoMatchingGraphError(
            "full-verification", "a higher-weight entry breaks the graph/angle form"
        )
    return result
