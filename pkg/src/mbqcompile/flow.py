"""Flow finding on geometries: path covers, dependency orders, and test oracles.

A geometry is an undirected graph with declared input and output vertex
subsets.  A flow is a successor function ``f`` from non-outputs to non-inputs
together with a partial order such that every ``x`` is adjacent to ``f(x)``,
precedes ``f(x)``, and precedes every neighbor of ``f(x)``.  The search runs
in three steps, each deterministic:

1. build a unit-capacity digraph whose maximum integral flow encodes a
   maximum family of vertex-disjoint input-to-output paths;
2. trace the flow into directed paths; if they do not cover every vertex no
   flow exists (the covering family is unique when one exists);
3. run a depth-first pass over the dependency relation to compute, for every
   vertex and every path, the earliest vertex of that path it must precede
   (a chain decomposition of the order); a revisit of an in-progress vertex
   is a dependency cycle and no flow exists.

Two brute-force oracles (small instances only) are included so the fast path
can be checked against direct definition chasing.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from collections.abc import Iterable, Mapping, Sequence

from .core import QubitIndexing

ORACLE_MAX_VERTICES = 8

# Node kinds in the max-flow digraph.  "AB" marks a merged out/in node for a
# vertex that is both an input and an output.
Node = tuple[str, int]
Arc = tuple[Node, Node]

SOURCE: Node = ("r", 0)
SINK: Node = ("s", 0)


class NoFlowError(Exception):
    """The geometry has no flow.

    ``reason`` is ``"uncovered"`` (the maximum path family misses vertices)
    or ``"dependency-cycle"`` (the successor function admits no compatible
    partial order); ``vertices`` carries the offending vertices.
    """

    def __init__(self, reason: str, vertices: Sequence[int], message: str):
        super().__init__(message)
        self.reason = reason
        self.vertices = tuple(vertices)


@dataclass(frozen=True, eq=False)
class Geometry:
    """Simple undirected graph with input and output subsets (overlap allowed)."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    inputs: frozenset[int]
    outputs: frozenset[int]

    def __init__(
        self,
        vertices: Iterable[int],
        edges: Iterable[tuple[int, int]],
        inputs: Iterable[int],
        outputs: Iterable[int],
    ):
        vs = tuple(sorted(vertices))
        if len(set(vs)) != len(vs):
            raise ValueError("vertex labels must be distinct")
        vset = set(vs)
        canon = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at {a}")
            if a not in vset or b not in vset:
                raise ValueError(f"edge ({a},{b}) leaves the vertex set")
            canon.add((min(a, b), max(a, b)))
        ins, outs = frozenset(inputs), frozenset(outputs)
        if not ins <= vset or not outs <= vset:
            raise ValueError("inputs and outputs must be subsets of the vertex set")
        adj: dict[int, list[int]] = {v: [] for v in vs}
        for a, b in canon:
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        object.__setattr__(self, "inputs", ins)
        object.__setattr__(self, "outputs", outs)
        object.__setattr__(self, "_adjacency", {v: tuple(sorted(ns)) for v, ns in adj.items()})

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adjacency[v]

    @property
    def non_inputs(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v not in self.inputs)

    @property
    def non_outputs(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v not in self.outputs)

    def indexing(self) -> QubitIndexing:
        """View as a qubit index layout (requires positive labels)."""
        return QubitIndexing(self.vertices, self.inputs, self.outputs)


def grid_geometry(rows: int, cols: int) -> Geometry:
    """Rectangular grid with the left column as inputs and the right as outputs.

    Vertex at row ``r``, column ``c`` gets label ``r * cols + c + 1``.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid must have positive dimensions")
    label = lambda r, c: r * cols + c + 1
    vertices = [label(r, c) for r in range(rows) for c in range(cols)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((label(r, c), label(r, c + 1)))
            if r + 1 < rows:
                edges.append((label(r, c), label(r + 1, c)))
    inputs = [label(r, 0) for r in range(rows)]
    outputs = [label(r, cols - 1) for r in range(rows)]
    return Geometry(vertices, edges, inputs, outputs)


# ---------------------------------------------------------------------------
# Max-flow digraph and maximum integral flow


@dataclass(frozen=True, eq=False)
class MaxFlowDigraph:
    """Unit-capacity digraph whose max flow encodes disjoint input-output paths.

    Every vertex ``v`` splits into an out-flow node (present when ``v`` is an
    input or a non-output) and an in-flow node (present when ``v`` is an
    output or a non-input); the two coincide when ``v`` is both an input and
    an output.  Inputs hang off a single source, outputs feed a single sink,
    the in-flow node of every plain vertex feeds its out-flow node, and graph
    edges become arcs from out-flow to in-flow nodes.  Unit capacities force
    the flow through each vertex to be at most one, making flow paths
    vertex-disjoint.
    """

    geometry: Geometry
    arcs: tuple[Arc, ...]
    successors: Mapping[Node, tuple[Node, ...]] = field(repr=False)
    predecessors: Mapping[Node, tuple[Node, ...]] = field(repr=False)

    def out_node(self, v: int) -> Node:
        g = self.geometry
        return ("AB", v) if v in g.inputs and v in g.outputs else ("A", v)

    def in_node(self, v: int) -> Node:
        g = self.geometry
        return ("AB", v) if v in g.inputs and v in g.outputs else ("B", v)


def build_max_flow_digraph(g: Geometry) -> MaxFlowDigraph:
    """Construct the unit-capacity digraph for ``g`` (linear in the edge count)."""

    def out_node(v: int) -> Node:
        return ("AB", v) if v in g.inputs and v in g.outputs else ("A", v)

    def in_node(v: int) -> Node:
        return ("AB", v) if v in g.inputs and v in g.outputs else ("B", v)

    arcs: list[Arc] = []
    for i in sorted(g.inputs):
        arcs.append((SOURCE, out_node(i)))
    for w in sorted(g.outputs):
        arcs.append((in_node(w), SINK))
    for v in g.vertices:
        if v not in g.inputs and v not in g.outputs:
            arcs.append((in_node(v), out_node(v)))
    for a, b in g.edges:
        for v, w in ((a, b), (b, a)):
            if v not in g.outputs and w not in g.inputs:
                arcs.append((out_node(v), in_node(w)))

    succ: dict[Node, list[Node]] = {}
    pred: dict[Node, list[Node]] = {}
    for x, y in arcs:
        succ.setdefault(x, []).append(y)
        pred.setdefault(y, []).append(x)
    # Deterministic traversal order: ascending vertex label, kind breaks ties.
    key = lambda node: (node[1], node[0])
    successors = {x: tuple(sorted(ys, key=key)) for x, ys in succ.items()}
    predecessors = {y: tuple(sorted(xs, key=key)) for y, xs in pred.items()}
    return MaxFlowDigraph(g, tuple(arcs), successors, predecessors)


def max_integral_flow(network: MaxFlowDigraph) -> dict[Arc, int]:
    """Maximum integral flow on the unit-capacity digraph.

    Ford-Fulkerson with breadth-first augmenting-path search from the source,
    neighbors visited in ascending vertex label order.  At most one
    augmentation per input, so the running time is O(inputs * arcs).
    """
    flow: dict[Arc, int] = {arc: 0 for arc in network.arcs}
    succ, pred = network.successors, network.predecessors
    while True:
        # parent[node] = (previous node, arc, is_forward)
        parent: dict[Node, tuple[Node, Arc, bool]] = {SOURCE: (SOURCE, (SOURCE, SOURCE), True)}
        queue: deque[Node] = deque([SOURCE])
        while queue and SINK not in parent:
            x = queue.popleft()
            for y in succ.get(x, ()):
                if y not in parent and flow[(x, y)] == 0:
                    parent[y] = (x, (x, y), True)
                    queue.append(y)
            for w in pred.get(x, ()):
                if w not in parent and flow[(w, x)] == 1:
                    parent[w] = (x, (w, x), False)
                    queue.append(w)
        if SINK not in parent:
            return flow
        node = SINK
        while node != SOURCE:
            prev, arc, forward = parent[node]
            flow[arc] = 1 if forward else 0
            node = prev


def flow_value(network: MaxFlowDigraph, flow: Mapping[Arc, int]) -> int:
    return sum(flow[(SOURCE, y)] for y in network.successors.get(SOURCE, ()))


# ---------------------------------------------------------------------------
# Path covers


@dataclass(frozen=True, eq=False)
class PathCover:
    """Vertex-disjoint directed paths covering a geometry.

    Paths may touch the inputs only at their start and the outputs only at
    their end.  ``successor`` is the induced injective function along the
    paths; its domain excludes every path end.
    """

    paths: tuple[tuple[int, ...], ...]

    def __init__(self, paths: Iterable[Sequence[int]]):
        ps = tuple(tuple(p) for p in paths)
        seen: set[int] = set()
        for p in ps:
            if not p:
                raise ValueError("empty path")
            for v in p:
                if v in seen:
                    raise ValueError(f"vertex {v} appears in more than one path")
                seen.add(v)
        object.__setattr__(self, "paths", ps)
        where = {}
        succ = {}
        for t, p in enumerate(ps):
            for j, v in enumerate(p):
                where[v] = (t, j)
                if j + 1 < len(p):
                    succ[v] = p[j + 1]
        object.__setattr__(self, "_where", where)
        object.__setattr__(self, "_succ", succ)

    @classmethod
    def from_paths(cls, g: Geometry, paths: Iterable[Sequence[int]]) -> PathCover:
        """Build and validate a cover against a geometry."""
        cover = cls(paths)
        covered = set(cover._where)
        if covered != set(g.vertices):
            missing = sorted(set(g.vertices) - covered)
            raise ValueError(f"paths do not cover vertices {missing}")
        for p in cover.paths:
            for a, b in zip(p, p[1:]):
                if b not in g.neighbors(a):
                    raise ValueError(f"path step {a}->{b} is not an edge")
            if p[-1] not in g.outputs:
                raise ValueError(f"path ending at {p[-1]} does not end at an output")
            for j, v in enumerate(p):
                if v in g.inputs and j != 0:
                    raise ValueError(f"input {v} appears mid-path")
                if v in g.outputs and j != len(p) - 1:
                    raise ValueError(f"output {v} appears mid-path")
        return cover

    @property
    def successor(self) -> dict[int, int]:
        return dict(self._succ)

    def successor_of(self, v: int) -> int | None:
        return self._succ.get(v)

    def path_of(self, v: int) -> int:
        return self._where[v][0]

    def position_of(self, v: int) -> int:
        """Distance of ``v`` from the start of its path."""
        return self._where[v][1]

    def arcs(self) -> set[tuple[int, int]]:
        return set(self._succ.items())


def find_path_cover(g: Geometry) -> PathCover:
    """Trace the maximum integral flow into a covering family of paths.

    Requires equally many inputs and outputs.  Raises :class:`NoFlowError`
    when the traced family leaves vertices uncovered: the covering family is
    unique when it exists, so an uncovered maximum family settles the
    question.
    """
    if len(g.inputs) != len(g.outputs):
        raise ValueError("flow finding requires |inputs| == |outputs|")
    network = build_max_flow_digraph(g)
    flow = max_integral_flow(network)
    paths: list[list[int]] = []
    for i in sorted(g.inputs):
        if flow[(SOURCE, network.out_node(i))] == 0:
            continue
        path = [i]
        seen = {i}
        x = i
        while x not in g.outputs:
            nxt = None
            for y in network.successors.get(network.out_node(x), ()):
                if flow[(network.out_node(x), y)] == 1:
                    nxt = y[1]
                    break
            if nxt is None or nxt in seen:
                raise NoFlowError(
                    "uncovered", [x], f"flow trace stalled at vertex {x}"
                )  # pragma: no cover - conservation makes this unreachable
            path.append(nxt)
            seen.add(nxt)
            x = nxt
        paths.append(path)
    covered = {v for p in paths for v in p}
    uncovered = sorted(set(g.vertices) - covered)
    if uncovered:
        raise NoFlowError(
            "uncovered",
            uncovered,
            f"no flow exists: maximum path family leaves {uncovered} uncovered",
        )
    return PathCover.from_paths(g, paths)


# ---------------------------------------------------------------------------
# Dependency order


@dataclass(frozen=True, eq=False)
class DependencyOrder:
    """Chain-decomposition form of the coarsest order compatible with a cover.

    ``sup[x][t]`` is the earliest vertex of path ``t`` that ``x`` precedes
    (or None).  ``x`` precedes ``y`` iff ``sup[x][path of y]`` exists and sits
    at or before ``y`` on that path.
    """

    cover: PathCover
    sup: Mapping[int, tuple[int | None, ...]]

    def precedes(self, x: int, y: int) -> bool:
        s = self.sup[x][self.cover.path_of(y)]
        return s is not None and self.cover.position_of(s) <= self.cover.position_of(y)


def _dependents(g: Geometry, cover: PathCover, x: int) -> tuple[int, ...]:
    """Vertices strictly depending on ``x``: its successor and that successor's
    other neighbors."""
    fx = cover.successor_of(x)
    if fx is None:
        return ()
    ys = {fx}
    ys.update(y for y in g.neighbors(fx) if y != x)
    return tuple(sorted(ys))


def find_dependency_order(g: Geometry, cover: PathCover) -> DependencyOrder:
    """Depth-first closure of the dependency relation, or a cycle report.

    Every non-output must have a successor in the cover.  Visiting a vertex
    that is already on the in-progress stack means the relation is cyclic, so
    the cover admits no compatible partial order and the geometry has no
    flow.
    """
    for v in g.vertices:
        if v not in g.outputs and cover.successor_of(v) is None:
            raise ValueError(f"non-output vertex {v} has no successor in the cover")
    num_paths = len(cover.paths)
    NONE, PENDING, FIXED = 0, 1, 2
    status = {v: NONE for v in g.vertices}
    sup: dict[int, list[int | None]] = {v: [None] * num_paths for v in g.vertices}
    pos = cover.position_of

    def merge(x: int, y: int) -> None:
        sx, sy = sup[x], sup[y]
        for t in range(num_paths):
            c = sy[t]
            if c is not None and (sx[t] is None or pos(c) < pos(sx[t])):
                sx[t] = c

    for start in g.vertices:
        if status[start] != NONE:
            continue
        status[start] = PENDING
        sup[start][cover.path_of(start)] = start
        # Stack frames: (vertex, its dependents, next dependent index).
        stack: list[list] = [[start, _dependents(g, cover, start), 0]]
        while stack:
            frame = stack[-1]
            x, deps, i = frame
            if i < len(deps):
                frame[2] = i + 1
                y = deps[i]
                if status[y] == NONE:
                    status[y] = PENDING
                    sup[y][cover.path_of(y)] = y
                    stack.append([y, _dependents(g, cover, y), 0])
                elif status[y] == PENDING:
                    at = next(j for j, fr in enumerate(stack) if fr[0] == y)
                    cycle = [fr[0] for fr in stack[at:]]
                    raise NoFlowError(
                        "dependency-cycle",
                        cycle,
                        f"no flow exists: dependency cycle {' -> '.join(map(str, cycle + [y]))}",
                    )
                else:
                    merge(x, y)
            else:
                stack.pop()
                status[x] = FIXED
                if stack:
                    merge(stack[-1][0], x)
    return DependencyOrder(cover, {v: tuple(s) for v, s in sup.items()})


@dataclass(frozen=True, eq=False)
class FlowResult:
    """A path cover together with its dependency order."""

    cover: PathCover
    order: DependencyOrder

    @property
    def successor(self) -> dict[int, int]:
        return self.cover.successor


def find_flow(g: Geometry) -> FlowResult:
    """Full pipeline: path cover, then dependency order.  Raises :class:`NoFlowError`."""
    cover = find_path_cover(g)
    order = find_dependency_order(g, cover)
    return FlowResult(cover, order)


def dependency_linear_extension(g: Geometry, cover: PathCover) -> tuple[int, ...]:
    """A deterministic linear extension of the dependency order over all vertices.

    Kahn's algorithm over the dependency relation with an ascending-label
    heap, so ties between incomparable vertices always break the same way.
    """
    indeg = {v: 0 for v in g.vertices}
    out: dict[int, tuple[int, ...]] = {}
    for x in g.vertices:
        ys = _dependents(g, cover, x)
        out[x] = ys
        for y in ys:
            indeg[y] += 1
    ready = [v for v in g.vertices if indeg[v] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        x = heapq.heappop(ready)
        order.append(x)
        for y in out[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(ready, y)
    if len(order) != len(g.vertices):
        raise ValueError("dependency relation is cyclic")
    return tuple(order)


# ---------------------------------------------------------------------------
# Brute-force oracles (small instances only)


def _check_size(g: Geometry) -> None:
    if len(g.vertices) > ORACLE_MAX_VERTICES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_VERTICES} vertices")


def oracle_has_flow(g: Geometry) -> bool:
    """Definition chasing: does any injective successor function work?

    Enumerates injective maps from non-outputs to non-inputs sending each
    vertex to a neighbor, and accepts one whose generated precedence relation
    is acyclic among distinct vertices.
    """
    _check_size(g)
    non_outputs = [v for v in g.vertices if v not in g.outputs]
    inputs = g.inputs

    def acyclic(f: dict[int, int]) -> bool:
        arcs: dict[int, set[int]] = {v: set() for v in g.vertices}
        for x, fx in f.items():
            arcs[x].add(fx)
            arcs[x].update(y for y in g.neighbors(fx) if y != x)
            arcs[x].discard(x)
        state: dict[int, int] = {}

        def dfs(v: int) -> bool:
            state[v] = 1
            for w in arcs[v]:
                s = state.get(w)
                if s == 1:
                    return False
                if s is None and not dfs(w):
                    return False
            state[v] = 2
            return True

        return all(state.get(v) == 2 or (state.get(v) is None and dfs(v)) for v in g.vertices)

    def search(idx: int, f: dict[int, int], used: set[int]) -> bool:
        if idx == len(non_outputs):
            return acyclic(f)
        x = non_outputs[idx]
        for y in g.neighbors(x):
            if y in inputs or y in used:
                continue
            f[x] = y
            used.add(y)
            if search(idx + 1, f, used):
                return True
            del f[x]
            used.discard(y)
        return False

    return search(0, {}, set())


def oracle_is_causal(g: Geometry, cover: PathCover) -> bool:
    """Exhaustive test that a cover has no vicious circuit.

    A vicious circuit is a closed walk that never immediately doubles back
    and traverses a cover arc on at least one of every two consecutive edges.
    Walks up to twice the vertex count are searched; True means none exists.
    """
    _check_size(g)
    arcs = cover.arcs()
    max_len = 2 * len(g.vertices)

    def extend(walk: list[int]) -> bool:
        """True iff some extension of ``walk`` closes into a vicious circuit."""
        head = walk[-1]
        for y in g.neighbors(head):
            if len(walk) >= 2:
                if y == walk[-2]:
                    continue
                if (walk[-2], head) not in arcs and (head, y) not in arcs:
                    continue
            if y == walk[0] and len(walk) >= 3:
                # Closing the walk: wrap-around conditions at the start vertex.
                if walk[-1] != walk[1] and (
                    (walk[-1], walk[0]) in arcs or (walk[0], walk[1]) in arcs
                ):
                    return True
                # A longer extension through y may still work; fall through.
            if len(walk) < max_len and extend(walk + [y]):
                return True
        return False

    return not any(extend([c0]) for c0 in g.vertices)
