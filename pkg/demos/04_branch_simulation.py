"""Why the corrections matter: branch enumeration with and without them.

A pattern's measurements can each come out 0 or 1, so a run follows one of
2**m computational branches.  The synthesized corrections make every branch
realize the same linear map; stripping them leaves branches that disagree.
"""
import numpy as np

from mbqcompile import (
    CorrectX,
    CorrectZ,
    Geometry,
    Pattern,
    branch_maps,
    find_flow,
    synthesize,
)

alpha = np.pi / 3
g = Geometry([1, 2, 3], [(1, 2), (2, 3)], inputs=[1], outputs=[3])
pattern = synthesize(g, find_flow(g), {1: (-alpha) % (2 * np.pi), 2: 0.0})

print("pattern for the Z rotation by pi/3:")
for cmd in pattern.commands:
    print("  ", cmd)

print("\nall four branches, with corrections:")
for b in branch_maps(pattern):
    print(f"  outcomes {b.outcomes}:")
    print(np.round(2 * b.matrix, 4))  # scaled by 2**(measured/2) for readability

stripped = Pattern(
    pattern.space,
    pattern.inputs,
    pattern.outputs,
    [c for c in pattern.commands if not isinstance(c, (CorrectX, CorrectZ))],
)
print("\nthe same pattern with corrections stripped is no longer deterministic:")
reference = None
for b in branch_maps(stripped):
    if reference is None:
        reference = b.matrix
    drift = np.max(np.abs(b.matrix - reference))
    print(f"  outcomes {b.outcomes}: max deviation from positive branch = {drift:.3f}")

print("\n(the X correction on the mid-path qubit looks redundant because that")
print(" qubit is later measured at angle 0, but dropping it flips the sign of")
print(" exactly one branch; strict branch equality needs the full set)")
partial = Pattern(
    pattern.space,
    pattern.inputs,
    pattern.outputs,
    [c for c in pattern.commands if c != CorrectX(2, signal=1)],
)
partial_branches = branch_maps(partial)
for b in partial_branches:
    drift = np.max(np.abs(b.matrix - partial_branches[0].matrix))
    print(f"  outcomes {b.outcomes}: max deviation = {drift:.3f}")
