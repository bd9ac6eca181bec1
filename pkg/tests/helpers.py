"""Shared generators for the test suite."""
from __future__ import annotations

import itertools

import numpy as np

from mbqcompile import Geometry, NoFlowError, find_flow


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def j_rotation(alpha: float) -> np.ndarray:
    """The Hadamard-like one-qubit generator with phase ``alpha``."""
    return 2**-0.5 * np.array(
        [[1.0, np.exp(-1j * alpha)], [1.0, -np.exp(-1j * alpha)]], dtype=complex
    )


def z_rotation(alpha: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * alpha)]).astype(complex)


Z_ROTATION_ALPHA = np.pi / 3


def z_rotation_diagonal(alpha: float = Z_ROTATION_ALPHA) -> np.ndarray:
    """The three-qubit diagonal whose sandwich is the Z rotation by ``alpha``."""
    e = np.exp(1j * alpha)
    return np.array([1, 1, 1, -1, e, e, -e, e], dtype=complex)


def six_cycle() -> Geometry:
    """Alternating inputs and outputs around a 6-cycle: the no-flow showcase."""
    return Geometry(range(1, 7), [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6)], [1, 3, 5], [2, 4, 6])


def random_geometry(rng: np.random.Generator, max_vertices: int = 8, max_io: int = 3) -> Geometry:
    """Random connected-ish geometry with equally many inputs and outputs."""
    n = int(rng.integers(2, max_vertices + 1))
    vertices = list(range(1, n + 1))
    p = float(rng.uniform(0.25, 0.6))
    edges = [(a, b) for a, b in itertools.combinations(vertices, 2) if rng.random() < p]
    k = int(rng.integers(1, min(max_io, n) + 1))
    inputs = list(rng.choice(vertices, size=k, replace=False))
    outputs = list(rng.choice(vertices, size=k, replace=False))
    return Geometry(vertices, edges, inputs, outputs)


def random_flow_geometry(rng: np.random.Generator, max_vertices: int = 8) -> Geometry:
    """Random geometry that is guaranteed to have a flow.

    Partitions the vertices into disjoint chains (inputs at the starts,
    outputs at the ends), which always admit a flow, then tries to sprinkle
    extra edges, keeping the result only when the pipeline still succeeds.
    """
    n = int(rng.integers(2, max_vertices + 1))
    vertices = list(range(1, n + 1))
    order = list(rng.permutation(vertices))
    k = int(rng.integers(1, max(1, n // 2) + 1))
    cuts = sorted(rng.choice(range(1, n), size=k - 1, replace=False)) if k > 1 else []
    chains = [order[a:b] for a, b in zip([0] + list(cuts), list(cuts) + [n])]
    edges = [(a, b) for chain in chains for a, b in zip(chain, chain[1:])]
    inputs = [c[0] for c in chains]
    outputs = [c[-1] for c in chains]
    g = Geometry(vertices, edges, inputs, outputs)
    extra = [(a, b) for a, b in itertools.combinations(vertices, 2) if rng.random() < 0.15]
    if extra:
        candidate = Geometry(vertices, list(g.edges) + extra, inputs, outputs)
        try:
            find_flow(candidate)
            return candidate
        except (NoFlowError, ValueError):
            pass
    return g
