"""Quantum walks on finite graphs with two attached tails.

Simulation of the edge-state walk, stationary scattering amplitudes,
first-arrival statistics via Taylor coefficients of the transmission
amplitude, bound states, and time-reversal checks, with every headline
quantity computable by at least two independent routes.
"""

from .engine import (
    FirstArrivalRecord,
    StepOperator,
    TruncationError,
    WalkState,
    build_step_operator,
    internal_block,
    run_measured_walk,
    run_walk,
    unitarity_defect,
)
from .graph import (
    CoinSpec,
    CoinValidationError,
    CustomMatrix,
    EdgeBasis,
    EdgeState,
    EqualTransmission,
    Free,
    Graph,
    GraphValidationError,
    Grover,
    TailConfig,
    build_edge_basis,
    graph_from_json,
    graph_hash,
    graph_to_json,
    internal_edge_states,
    load_fixture,
    load_graph,
    make_coin,
    parse_edge_state,
    validate_coin_constraints,
)
from .oracle import PathAmplitude, path_amplitudes, path_sum
from .random_graphs import random_graph
from .scattering import (
    PoleProximityError,
    converged_transmission_series,
    ResonanceWarning,
    ScatteringSingularError,
    ScatteringSolution,
    TransmissionSeries,
    left_right_defect,
    p_out_series,
    p_out_spectral,
    scan_circle,
    solve_scattering,
    transmission_at,
    transmission_series,
)
from .spectral import (
    BoundState,
    bound_state_orthogonality,
    check_time_reversal,
    find_bound_states,
)

__version__ = "0.1.0"

__all__ = [
    "BoundState",
    "CoinSpec",
    "CoinValidationError",
    "CustomMatrix",
    "EdgeBasis",
    "EdgeState",
    "EqualTransmission",
    "FirstArrivalRecord",
    "Free",
    "Graph",
    "GraphValidationError",
    "Grover",
    "PathAmplitude",
    "PoleProximityError",
    "ResonanceWarning",
    "ScatteringSingularError",
    "ScatteringSolution",
    "StepOperator",
    "TailConfig",
    "TransmissionSeries",
    "TruncationError",
    "WalkState",
    "bound_state_orthogonality",
    "build_edge_basis",
    "build_step_operator",
    "check_time_reversal",
    "converged_transmission_series",
    "find_bound_states",
    "graph_from_json",
    "graph_hash",
    "graph_to_json",
    "internal_block",
    "internal_edge_states",
    "left_right_defect",
    "load_fixture",
    "load_graph",
    "make_coin",
    "p_out_series",
    "p_out_spectral",
    "parse_edge_state",
    "path_amplitudes",
    "path_sum",
    "random_graph",
    "run_measured_walk",
    "run_walk",
    "scan_circle",
    "solve_scattering",
    "transmission_at",
    "transmission_series",
    "unitarity_defect",
    "validate_coin_constraints",
]
