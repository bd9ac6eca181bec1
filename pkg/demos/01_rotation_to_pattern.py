"""Compile a one-qubit rotation into a two-qubit measurement pattern.

Walks the whole pipeline on the smallest interesting input: the
Hadamard-like rotation J(a) = 2**-0.5 * [[1, e^{-ia}], [1, -e^{-ia}]].
One auxiliary qubit suffices because every coefficient of J(a) already has
modulus 2**-0.5, so each diagonal slot is forced.
"""
import numpy as np

from mbqcompile import CompileConfig, UnitaryMatrix, branch_maps, compile_unitary

alpha = np.pi / 4
J = 2**-0.5 * np.array([[1, np.exp(-1j * alpha)], [1, -np.exp(-1j * alpha)]])

print("input unitary J(pi/4):")
print(np.round(J, 4))

result = compile_unitary(UnitaryMatrix(1, J), CompileConfig(aux=1, outputs=(2,)))
assert result.success

print("\nphase map diagonal (qubit 1 is the most significant bit):")
print(np.round(result.phase_map.diagonal, 4))

print("\nextracted entanglement graph and measurement angles:")
print("  edges: ", result.match.edges)
print("  angles:", result.match.angles)

print("\nflow: measure each qubit before its successor")
print("  f =", result.flow.successor)

print("\nsynthesized command sequence (applied left to right):")
for i, cmd in enumerate(result.pattern.commands):
    print(f"  {i}: {cmd}")

print("\nevery measurement branch realizes the same map:")
for branch in branch_maps(result.pattern):
    print(f"  outcomes {branch.outcomes}: max |A_s - J/sqrt(2)| =",
          f"{np.max(np.abs(branch.matrix - J / np.sqrt(2))):.2e}")

print("\nverification report:", result.verification)
