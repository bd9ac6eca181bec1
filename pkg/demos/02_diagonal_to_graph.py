"""Recover a graph and angles from a phase map diagonal, or prove none exists.

A diagonal of unit phases implements a graph state computation exactly when
every entry factors as exp(-i * sum of angles) times a product of edge
signs.  Weight-1 entries pin the angles, weight-2 entries pin the edges,
and a final pass over all entries guards against diagonals that satisfy the
low-weight constraints without factoring globally.
"""
import numpy as np

from mbqcompile import (
    NoMatchingGraphError,
    PhaseMapDiagonal,
    QubitIndexing,
    match_diagonal,
    verify_full,
)
from mbqcompile.graphmatch import MatchResult, extract_angles, extract_edges

alpha = np.pi / 3
e = np.exp(1j * alpha)
diagonal = np.array([1, 1, 1, -1, e, e, -e, e])
indexing = QubitIndexing([1, 2, 3], inputs=[1], outputs=[3])

print("diagonal over qubits (1, 2, 3):")
print(np.round(diagonal, 4))

result = match_diagonal(PhaseMapDiagonal(3, diagonal), indexing)
print("\nmatched: edges", result.edges, "angles", {v: round(a, 4) for v, a in result.angles.items()})
print("(qubit 1 is measured at -pi/3, qubit 2 at 0, output 3 carries angle 0)")

# The pair {1,3} reads entry e^{ia} = +e^{-i(a_1 + 0)}: a plus sign, so no edge.
print("\npair (1,3) has a positive sign: present in no edge list ->", (1, 3) not in result.edges)

# Corrupt one high-weight entry: the cheap checks still pass, the full pass fails.
corrupted = diagonal.copy()
corrupted[7] = -corrupted[7]
phi = PhaseMapDiagonal(3, corrupted)
angles = extract_angles(phi, indexing)
edges = extract_edges(phi, indexing, angles)
print("\nafter corrupting the weight-3 entry:")
print("  low-weight extraction still returns", edges)
print("  full verification passes?", verify_full(phi, MatchResult(edges, angles), indexing))

# A diagonal that is not even sign-consistent fails immediately, reading
# only a handful of entries.
try:
    match_diagonal(PhaseMapDiagonal(2, np.array([1, 1, 1, np.exp(1j * 0.5)])),
                   QubitIndexing([1, 2], [1], [2]))
except NoMatchingGraphError as exc:
    print("\nnon-factoring diagonal rejected early:", exc)
