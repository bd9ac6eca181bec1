"""End-to-end compilation: nested backtracking search from unitary to pattern.

The search runs, outermost to innermost, over

1. the auxiliary qubit count (expanding the space one qubit at a time up to
   a configured maximum),
2. the output set (an explicit choice, or all size-``|I|`` subsets of the
   fresh qubits in lexicographic order),
3. the slot solution (the canonical construction first, then alternative
   axes for the free antipodal pairs of zero coefficients, then a seeded
   random tail),
4. the per-coefficient slot permutations (lexicographic, deduplicated when
   permuted terms coincide).

Each innermost candidate is pushed through graph matching (which fails
lazily on a handful of diagonal entries), full diagonal verification, flow
finding, synthesis, and exhaustive branch simulation.  The first candidate
surviving everything wins; search order is fixed, so results are
reproducible for a given seed and caps.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import MATRIX_TOL, PhaseMapDiagonal, QubitIndexing, UnitaryMatrix
from .flow import FlowResult, Geometry, NoFlowError, find_dependency_order, find_path_cover
from .graphmatch import (
    MatchResult,
    NoMatchingGraphError,
    extract_angles,
    extract_edges,
    verify_full,
)
from .pattern import Pattern, synthesize
from .phasemap import (
    DecompositionPlan,
    SlotBoundError,
    ZERO_AXIS_DEFAULT,
    enumerate_diagonal,
    entry_function,
    solve_all_slots,
)
from .sim import VerificationReport, check_deterministic_and_equal

FAILURE_CLASSES = (
    "lemma-bound",
    "no-matching-graph",
    "no-path-cover",
    "dependency-cycle",
    "verification-mismatch",
)


@dataclass
class CompileConfig:
    """Search parameters; every cap must be positive.

    ``aux`` defaults to twice the input count, which always admits slot
    solutions; ``max_aux`` (default equal to ``aux``) allows the space to be
    expanded when everything else fails.  ``outputs``, when given, must be
    disjoint from the inputs.  ``max_perm_trials`` caps the combined number
    of candidate diagonals evaluated across the whole search;
    ``max_phase_trials`` caps the slot-solution variants tried per output
    set, with ``random_phase_trials`` of them drawn from the seeded RNG
    after the deterministic candidates run out.
    """

    aux: int | None = None
    max_aux: int | None = None
    outputs: tuple[int, ...] | None = None
    max_perm_trials: int = 10_000
    max_phase_trials: int = 64
    random_phase_trials: int = 8
    seed: int = 0
    tol: float = MATRIX_TOL

    def __post_init__(self) -> None:
        for name in ("max_perm_trials", "max_phase_trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.random_phase_trials < 0:
            raise ValueError("random_phase_trials must be non-negative")
        if self.aux is not None and self.aux < 1:
            raise ValueError("aux must be positive")
        if self.max_aux is not None and self.aux is not None and self.max_aux < self.aux:
            raise ValueError("max_aux must be at least aux")


@dataclass
class SearchStats:
    """Candidate counts; ``trials`` equals failures plus successes."""

    trials: int = 0
    failures: dict[str, int] = field(default_factory=lambda: {c: 0 for c in FAILURE_CLASSES})
    caps_hit: list[str] = field(default_factory=list)

    def record(self, failure_class: str) -> None:
        self.failures[failure_class] += 1

    def cap(self, name: str) -> None:
        if name not in self.caps_hit:
            self.caps_hit.append(name)


@dataclass
class CompileSuccess:
    """Everything the pipeline produced for the winning candidate."""

    unitary: UnitaryMatrix
    indexing: QubitIndexing
    phase_map: PhaseMapDiagonal
    match: MatchResult
    geometry: Geometry
    flow: FlowResult
    pattern: Pattern
    verification: VerificationReport
    aux: int
    stats: SearchStats

    success = True


@dataclass
class ExhaustionReport:
    """Search ended with no surviving candidate; counts say where they died."""

    stats: SearchStats

    success = False

    def classify(self) -> str:
        """Overall failure class: a hit cap, else the most common stage failure."""
        if self.stats.caps_hit:
            return "cap-exhausted"
        failures = self.stats.failures
        return max(FAILURE_CLASSES, key=lambda c: failures[c])


def _zero_axis_candidates(U: UnitaryMatrix) -> list[float]:
    """Deterministic axis choices for the free pairs of zero coefficients.

    A diagonal can only match a graph if every entry is a sign times a
    product of the extracted angle phases, and those angles trace back to
    the phases of the unitary's nonzero coefficients.  So beyond the two
    antipodal-axis conventions, the phases of the coefficients themselves
    (and their negations) are the natural finite candidate set.
    """
    two_pi = 2 * math.pi
    candidates = [ZERO_AXIS_DEFAULT, 0.0]
    mags = np.abs(U.entries)
    for p, q in np.argwhere(mags > 1e-12):
        a = float(np.angle(U.entries[p, q])) % two_pi
        for cand in (a, (-a) % two_pi):
            if all(abs(cand - c) > 1e-9 for c in candidates):
                candidates.append(cand)
    return candidates


def _phase_assignments(U: UnitaryMatrix, zero_coeffs: list[tuple[int, int]], cfg: CompileConfig):
    """Yield zero-coefficient axis assignments: canonical, deterministic, random."""
    yield {}
    if not zero_coeffs:
        return
    candidates = _zero_axis_candidates(U)
    for combo in itertools.product(candidates, repeat=len(zero_coeffs)):
        if all(abs(a - ZERO_AXIS_DEFAULT) < 1e-15 for a in combo):
            continue  # the canonical assignment already ran
        yield dict(zip(zero_coeffs, combo))
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.random_phase_trials):
        combo = rng.uniform(0.0, 2 * math.pi, size=len(zero_coeffs))
        yield dict(zip(zero_coeffs, (float(a) for a in combo)))


def _distinct_permutations(terms: np.ndarray, limit: int) -> list[tuple[int, ...]]:
    """Index permutations giving distinct term orderings, lexicographic, lazy.

    Equal terms are interchangeable, so only the smallest unused index of
    each distinct value is tried per position: coefficients whose terms all
    coincide contribute a single identity entry, and the enumeration never
    touches the factorially many equivalent rearrangements.  At most
    ``limit`` permutations are produced (more could never be evaluated under
    the candidate budget anyway).
    """
    m = len(terms)
    keys = [complex(round(t.real, 12), round(t.imag, 12)) for t in terms]
    used = [False] * m
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int]) -> bool:
        if len(prefix) == m:
            out.append(tuple(prefix))
            return len(out) >= limit
        tried: set[complex] = set()
        for idx in range(m):
            if used[idx] or keys[idx] in tried:
                continue
            tried.add(keys[idx])
            used[idx] = True
            prefix.append(idx)
            full = rec(prefix)
            prefix.pop()
            used[idx] = False
            if full:
                return True
        return False

    rec([])
    return out


def compile_unitary(U: UnitaryMatrix, cfg: CompileConfig | None = None) -> CompileSuccess | ExhaustionReport:
    """Search for a deterministic pattern realizing ``U``.

    Returns a :class:`CompileSuccess` bundle for the first candidate whose
    synthesized pattern is branch-deterministic and reproduces ``U``, or an
    :class:`ExhaustionReport` with per-stage failure counts.
    """
    cfg = cfg or CompileConfig()
    k = U.num_qubits
    inputs = tuple(range(1, k + 1))
    aux0 = cfg.aux if cfg.aux is not None else 2 * k
    if aux0 < k:
        raise ValueError(f"{aux0} auxiliary qubits cannot host {k} outputs disjoint from the inputs")
    max_aux = cfg.max_aux if cfg.max_aux is not None else aux0
    if cfg.outputs is not None and set(cfg.outputs) & set(inputs):
        raise ValueError("explicit outputs must be disjoint from the inputs")
    stats = SearchStats()

    for n in range(aux0, max_aux + 1):
        vertices = tuple(range(1, k + n + 1))
        fresh = tuple(range(k + 1, k + n + 1))
        if cfg.outputs is not None:
            if not set(cfg.outputs) <= set(vertices) or len(cfg.outputs) != k:
                raise ValueError(f"outputs must be {k} labels among {vertices}")
            output_sets = [tuple(sorted(cfg.outputs))]
        else:
            output_sets = [tuple(c) for c in itertools.combinations(fresh, k)]

        for outputs in output_sets:
            indexing = QubitIndexing(vertices, inputs, outputs)
            coeffs = [(p, q) for p in range(U.dim) for q in range(U.dim)]
            zero_coeffs = [pq for pq in coeffs if abs(U.coefficient(*pq)) <= 1e-12]

            phase_iter = _phase_assignments(U, zero_coeffs, cfg)
            for phase_trial in range(cfg.max_phase_trials + 1):
                axes = next(phase_iter, None)
                if axes is None:
                    break
                if phase_trial == cfg.max_phase_trials:
                    stats.cap("phase-trials")
                    break
                try:
                    slots = solve_all_slots(
                        U, DecompositionPlan(indexing), zero_axes=axes or None
                    )
                except SlotBoundError:
                    if stats.trials >= cfg.max_perm_trials:
                        stats.cap("perm-trials")
                        return ExhaustionReport(stats)
                    stats.trials += 1
                    stats.record("lemma-bound")
                    break  # no slot solution exists at this output set and width

                perm_lists = [
                    _distinct_permutations(slots[pq].terms, cfg.max_perm_trials)
                    for pq in coeffs
                ]
                for combo in itertools.product(*perm_lists):
                    if stats.trials >= cfg.max_perm_trials:
                        stats.cap("perm-trials")
                        return ExhaustionReport(stats)
                    stats.trials += 1
                    plan = DecompositionPlan(indexing, dict(zip(coeffs, combo)))
                    entry = entry_function(plan, slots)
                    try:
                        angles = extract_angles(entry, indexing, tol=cfg.tol)
                        edges = extract_edges(entry, indexing, angles, tol=cfg.tol)
                    except NoMatchingGraphError:
                        stats.record("no-matching-graph")
                        continue
                    match = MatchResult(edges, angles)
                    phi = enumerate_diagonal(U, plan, slots)
                    if not verify_full(phi, match, indexing, tol=cfg.tol):
                        stats.record("no-matching-graph")
                        continue
                    geometry = Geometry(vertices, match.edges, inputs, outputs)
                    try:
                        cover = find_path_cover(geometry)
                    except NoFlowError:
                        stats.record("no-path-cover")
                        continue
                    try:
                        order = find_dependency_order(geometry, cover)
                    except NoFlowError:
                        stats.record("dependency-cycle")
                        continue
                    flow = FlowResult(cover, order)
                    pat = synthesize(geometry, flow, match.angles)
                    verification = check_deterministic_and_equal(pat, U, tol=cfg.tol)
                    if verification.deterministic and verification.matches_unitary:
                        return CompileSuccess(
                            unitary=U,
                            indexing=indexing,
                            phase_map=phi,
                            match=match,
                            geometry=geometry,
                            flow=flow,
                            pattern=pat,
                            verification=verification,
                            aux=n,
                            stats=stats,
                        )
                    stats.record("verification-mismatch")
    return ExhaustionReport(stats)
