"""Brute-force references the fast flow algorithms are checked against."""
from __future__ import annotations

from collections import deque

from mbqcompile import Geometry, PathCover


def dependency_closure(g: Geometry, cover: PathCover) -> set[tuple[int, int]]:
    """All ordered pairs (x, y), x != y, with y reachable from x over the
    dependency relation (successor and successor's neighbors)."""
    reach: set[tuple[int, int]] = set()
    for x in g.vertices:
        queue = deque([x])
        seen = {x}
        while queue:
            v = queue.popleft()
            fv = cover.successor_of(v)
            if fv is None:
                continue
            nxt = {fv} | {y for y in g.neighbors(fv) if y != v}
            for y in nxt - seen:
                seen.add(y)
                queue.append(y)
        reach.update((x, y) for y in seen if y != x)
    return reach


def all_io_paths(g: Geometry, start: int) -> list[tuple[int, ...]]:
    """Simple paths from ``start`` that avoid other inputs, stop at the first
    output, and end there."""
    out: list[tuple[int, ...]] = []
    if start in g.outputs:
        return [(start,)]

    def extend(path: list[int]) -> None:
        for y in g.neighbors(path[-1]):
            if y in path or y in g.inputs:
                continue
            if y in g.outputs:
                out.append(tuple(path) + (y,))
            else:
                extend(path + [y])

    extend([start])
    return out


def all_io_path_families(g: Geometry) -> list[frozenset[tuple[int, ...]]]:
    """Every family of vertex-disjoint input-to-output paths (any size)."""
    inputs = sorted(g.inputs)
    per_input = {i: all_io_paths(g, i) for i in inputs}
    families: set[frozenset[tuple[int, ...]]] = set()

    def choose(idx: int, chosen: list[tuple[int, ...]], used: set[int]) -> None:
        if idx == len(inputs):
            families.add(frozenset(chosen))
            return
        choose(idx + 1, chosen, used)  # leave this input unused
        for path in per_input[inputs[idx]]:
            if used.isdisjoint(path):
                choose(idx + 1, chosen + [path], used | set(path))

    choose(0, [], set())
    return sorted(families, key=lambda fam: sorted(fam))


def maximum_families_and_covers(
    g: Geometry,
) -> tuple[list[frozenset[tuple[int, ...]]], list[frozenset[tuple[int, ...]]]]:
    """All maximum-size disjoint path families, and those covering every vertex."""
    families = all_io_path_families(g)
    best = max((len(f) for f in families), default=0)
    maximum = [f for f in families if len(f) == best]
    covering = [f for f in maximum if {v for p in f for v in p} == set(g.vertices)]
    return maximum, covering
