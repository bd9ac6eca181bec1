import heapq

import numpy as np
import pytest

from helpers import random_flow_geometry
from mbqcompile import (
    CorrectX,
    CorrectZ,
    Entangle,
    Geometry,
    Measure,
    Pattern,
    Prep,
    branch_maps,
    find_flow,
    synthesize,
    validate_pattern,
)
from mbqcompile.flow import _dependents


def _j_setup(alpha):
    g = Geometry([1, 2], [(1, 2)], [1], [2])
    return g, find_flow(g), {1: alpha}


def _z_setup(alpha):
    g = Geometry([1, 2, 3], [(1, 2), (2, 3)], [1], [3])
    return g, find_flow(g), {1: (-alpha) % (2 * np.pi), 2: 0.0}


def test_synthesize_example_1():
    alpha = np.pi / 4
    pattern = synthesize(*_j_setup(alpha))
    assert pattern.commands == (
        Prep(2),
        Entangle((1, 2)),
        Measure(1, alpha),
        CorrectX(2, signal=1),
    )
    assert validate_pattern(pattern).ok


def test_synthesize_example_2():
    alpha = np.pi / 3
    pattern = synthesize(*_z_setup(alpha))
    # The corrections for measuring 1 target the successor 2 (X) and the
    # successor's other neighbor 3 (Z); dropping the X on 2 would flip the
    # sign of the branch where both outcomes are 1.
    assert pattern.commands == (
        Prep(2),
        Prep(3),
        Entangle((1, 2)),
        Entangle((2, 3)),
        Measure(1, (-alpha) % (2 * np.pi)),
        CorrectZ(3, signal=1),
        CorrectX(2, signal=1),
        Measure(2, 0.0),
        CorrectX(3, signal=2),
    )
    assert validate_pattern(pattern).ok


def test_synthesize_entangle_only_when_everything_is_output():
    g = Geometry([1, 2, 3], [(1, 2), (2, 3)], [1, 2, 3], [1, 2, 3])
    pattern = synthesize(g, find_flow(g), {})
    assert all(isinstance(c, Entangle) for c in pattern.commands)
    assert len(pattern.commands) == 2
    assert validate_pattern(pattern).ok


def test_synthesize_requires_angles_for_all_non_outputs():
    g, flow, _ = _z_setup(0.5)
    with pytest.raises(ValueError):
        synthesize(g, flow, {1: 0.1})


def test_synthesize_rejects_mismatched_flow():
    g, flow, angles = _j_setup(0.3)
    other = Geometry([1, 2, 3], [(1, 2), (2, 3)], [1], [3])
    with pytest.raises(ValueError):
        synthesize(other, flow, {1: 0.1, 2: 0.2})


def test_validate_flags_standard_form_violation():
    pattern = synthesize(*_j_setup(0.2))
    cmds = list(pattern.commands)
    cmds[1], cmds[2] = cmds[2], cmds[1]  # measurement before the entangler
    report = validate_pattern(Pattern(pattern.space, pattern.inputs, pattern.outputs, cmds))
    assert not report.ok
    assert report.condition == "standard-form"
    assert report.command_index == 2


def test_validate_flags_unmeasured_signal():
    p = Pattern([1, 2], [1], [2], [Prep(2), Entangle((1, 2)), CorrectX(2, signal=1), Measure(1, 0.0)])
    report = validate_pattern(p)
    assert not report.ok
    assert report.condition == "dependency-order"
    assert report.command_index == 2


def test_validate_flags_commands_on_measured_qubits():
    p = Pattern([1, 2], [1], [2], [Prep(2), Entangle((1, 2)), Measure(1, 0.0), CorrectZ(1, signal=1)])
    report = validate_pattern(p)
    assert not report.ok
    assert report.condition == "acts-on-measured"


def test_validate_flags_wrong_measured_and_prepared_sets():
    no_meas = Pattern([1, 2], [1], [2], [Prep(2), Entangle((1, 2))])
    assert validate_pattern(no_meas).condition == "measured-set"
    meas_output = Pattern([1, 2], [1], [2], [Prep(2), Entangle((1, 2)), Measure(2, 0.0), Measure(1, 0.0)])
    assert validate_pattern(meas_output).condition == "measured-set"
    no_prep = Pattern([1, 2], [1], [2], [Measure(1, 0.0)])
    assert validate_pattern(no_prep).condition == "prepared-set"
    uses_unprepared = Pattern([1, 2], [1], [2], [Entangle((1, 2)), Measure(1, 0.0), Prep(2)])
    assert validate_pattern(uses_unprepared).condition == "acts-on-unprepared"
    prep_input = Pattern([1, 2], [1], [2], [Prep(1), Prep(2), Entangle((1, 2)), Measure(1, 0.0)])
    assert validate_pattern(prep_input).condition == "prepared-set"


def test_correction_targets_are_successor_neighborhoods():
    rng = np.random.default_rng(6)
    for _ in range(25):
        g = random_flow_geometry(rng)
        flow = find_flow(g)
        pattern = synthesize(g, flow, {v: float(rng.uniform(0, 2 * np.pi)) for v in g.non_outputs})
        assert validate_pattern(pattern).ok
        f = flow.successor
        z_targets: dict[int, set[int]] = {}
        for cmd in pattern.commands:
            if isinstance(cmd, CorrectZ):
                z_targets.setdefault(cmd.signal, set()).add(cmd.qubit)
            elif isinstance(cmd, CorrectX):
                assert cmd.qubit == f[cmd.signal]
        for i in g.non_outputs:
            expected = set(g.neighbors(f[i])) - {i}
            assert z_targets.get(i, set()) == expected


def _synthesize_with_descending_ties(g, flow, angles):
    """Same emission as synthesize() but Kahn ties break descending."""
    indeg = {v: 0 for v in g.vertices}
    out = {}
    for x in g.vertices:
        ys = _dependents(g, flow.cover, x)
        out[x] = ys
        for y in ys:
            indeg[y] += 1
    ready = [-v for v in g.vertices if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        x = -heapq.heappop(ready)
        order.append(x)
        for y in out[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(ready, -y)
    commands = [Prep(v) for v in g.non_inputs]
    commands += [Entangle(e) for e in g.edges]
    f = flow.cover.successor
    for i in order:
        if i in g.outputs:
            continue
        commands.append(Measure(i, float(angles[i])))
        for k in g.neighbors(f[i]):
            if k != i:
                commands.append(CorrectZ(k, i))
        commands.append(CorrectX(f[i], i))
    return Pattern(g.vertices, g.inputs, g.outputs, commands)


def test_any_linear_extension_gives_identical_branch_maps():
    rng = np.random.default_rng(14)
    compared = 0
    for _ in range(60):
        g = random_flow_geometry(rng, max_vertices=6)
        flow = find_flow(g)
        angles = {v: float(rng.uniform(0, 2 * np.pi)) for v in g.non_outputs}
        asc = synthesize(g, flow, angles)
        desc = _synthesize_with_descending_ties(g, flow, angles)
        if asc.commands == desc.commands:
            continue
        b_asc = branch_maps(asc)
        b_desc = branch_maps(desc)
        asc_order = list(asc.measured_qubits)
        desc_order = list(desc.measured_qubits)
        by_outcome = {
            tuple(sorted(zip(desc_order, map(int, b.outcomes)))): b.matrix for b in b_desc
        }
        for b in b_asc:
            key = tuple(sorted(zip(asc_order, map(int, b.outcomes))))
            assert np.allclose(b.matrix, by_outcome[key], atol=1e-12)
        compared += 1
    assert compared >= 5
