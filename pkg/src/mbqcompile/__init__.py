"""Compile unitaries into deterministic one-way measurement patterns.

The pipeline factors a unitary into a preparation map, a diagonal of unit
phases, and a restriction map; extracts the matching entanglement graph and
measurement angles; finds a causal flow on the resulting geometry; emits the
deterministic pattern; and verifies it by exhaustive branch simulation.
"""

from .core import (
    PhaseMapDiagonal,
    QubitIndexing,
    StateVector,
    UnitaryMatrix,
    apply_preparation,
    apply_restriction,
    decomposition_matrix,
)
from .driver import CompileConfig, CompileSuccess, ExhaustionReport, compile_unitary
from .flow import (
    DependencyOrder,
    FlowResult,
    Geometry,
    MaxFlowDigraph,
    NoFlowError,
    PathCover,
    build_max_flow_digraph,
    dependency_linear_extension,
    find_dependency_order,
    find_flow,
    find_path_cover,
    flow_value,
    grid_geometry,
    max_integral_flow,
    oracle_has_flow,
    oracle_is_causal,
)
from .graphmatch import (
    MatchResult,
    NoMatchingGraphError,
    extract_angles,
    extract_edges,
    match_diagonal,
    verify_full,
)
from .pattern import (
    CorrectX,
    CorrectZ,
    Entangle,
    Measure,
    Pattern,
    Prep,
    ValidationReport,
    synthesize,
    validate_pattern,
)
from .phasemap import (
    DecompositionPlan,
    SlotBoundError,
    SlotSolution,
    enumerate_diagonal,
    entry_function,
    solve_all_slots,
    solve_slots,
    verify_decomposition,
)
from .sim import (
    BranchMap,
    VerificationReport,
    branch_maps,
    check_deterministic_and_equal,
    positive_branch_phase_map,
    run_branch,
)

__version__ = "0.1.0"

__all__ = [
    "BranchMap",
    "CompileConfig",
    "CompileSuccess",
    "CorrectX",
    "CorrectZ",
    "DecompositionPlan",
    "DependencyOrder",
    "Entangle",
    "ExhaustionReport",
    "FlowResult",
    "Geometry",
    "MatchResult",
    "MaxFlowDigraph",
    "Measure",
    "NoFlowError",
    "NoMatchingGraphError",
    "PathCover",
    "Pattern",
    "PhaseMapDiagonal",
    "Prep",
    "QubitIndexing",
    "SlotBoundError",
    "SlotSolution",
    "StateVector",
    "UnitaryMatrix",
    "ValidationReport",
    "VerificationReport",
    "apply_preparation",
    "apply_restriction",
    "branch_maps",
    "build_max_flow_digraph",
    "check_deterministic_and_equal",
    "compile_unitary",
    "decomposition_matrix",
    "dependency_linear_extension",
    "enumerate_diagonal",
    "entry_function",
    "extract_angles",
    "extract_edges",
    "find_dependency_order",
    "find_flow",
    "find_path_cover",
    "flow_value",
    "grid_geometry",
    "match_diagonal",
    "max_integral_flow",
    "oracle_has_flow",
    "oracle_is_causal",
    "positive_branch_phase_map",
    "run_branch",
    "solve_all_slots",
    "solve_slots",
    "synthesize",
    "validate_pattern",
    "verify_decomposition",
    "verify_full",
]
