"""Total-variation-regularized consensus on graphs.

Public API: graph construction and discrete calculus, TV and its dual norm,
per-agent objectives, synchronous consensus engines, optimality and
robustness analysis, and the experiment harness.
"""

from .analysis import (
    OptimalityCertificate,
    StubbornPrediction,
    ac_critical_lambda,
    certify_consensus_minimizer,
    mc_lambda0_exact,
    mc_lambda0_upper,
    stubborn_limit,
)
from .config import ExperimentConfig, load_config
from .dualnorm import (
    DualNormResult,
    dual_feasibility_gap,
    dual_norm_algorithm0,
    dual_norm_bruteforce,
)
from .engines import (
    AdmmEngine,
    AdmmState,
    AgentRoles,
    GossipEngine,
    GossipMatrix,
    StopRule,
    SubgradientEngine,
    SubgradientState,
    Trajectory,
    admm_step,
    disagreement,
    gossip_limit,
    gossip_step,
    harmonic_schedule,
    run,
    subgradient_step,
    uniform_gossip_matrix,
)
from .errors import (
    AssumptionError,
    ConfigError,
    DomainError,
    InvalidFieldError,
    InvalidSubsetError,
    IterationAnomalyError,
    SizeCapError,
    TvConsensusError,
    UnsupportedGraphError,
    UnsupportedOperationError,
)
from .graph import (
    Graph,
    complete_graph,
    connected_components,
    cycle_graph,
    div,
    erdos_renyi,
    grad,
    laplacian_apply,
    load_edge_list,
    path_graph,
    perimeter,
    read_node_field,
    save_edge_list,
)
from .harness import ExperimentResult, run_experiment
from .maxflow import CutResult, FlowNetwork, build_network, maximize_cut_functional, min_cut
from .metrics import MetricsRow, emit_csv, metrics_from_trajectory, parse_csv
from .objectives import (
    Absolute,
    AggregateObjective,
    CustomObjective,
    Quadratic,
    QuadraticPlusStubborn,
    aggregate_absolute,
    aggregate_quadratic,
    soft_threshold,
)
from .tv import LevelSetDecomposition, coarea_decompose, is_dual_certificate, tv_norm

__version__ = "0.1.0"

__all__ = [
    "Absolute",
    "AdmmEngine",
    "AdmmState",
    "AgentRoles",
    "AggregateObjective",
    "AssumptionError",
    "ConfigError",
    "CustomObjective",
    "CutResult",
    "DomainError",
    "DualNormResult",
    "ExperimentConfig",
    "ExperimentResult",
    "FlowNetwork",
    "GossipEngine",
    "GossipMatrix",
    "Graph",
    "InvalidFieldError",
    "InvalidSubsetError",
    "IterationAnomalyError",
    "LevelSetDecomposition",
    "MetricsRow",
    "OptimalityCertificate",
    "Quadratic",
    "QuadraticPlusStubborn",
    "SizeCapError",
    "StopRule",
    "StubbornPrediction",
    "SubgradientEngine",
    "SubgradientState",
    "Trajectory",
    "TvConsensusError",
    "UnsupportedGraphError",
    "UnsupportedOperationError",
    "ac_critical_lambda",
    "admm_step",
    "aggregate_absolute",
    "aggregate_quadratic",
    "build_network",
    "certify_consensus_minimizer",
    "coarea_decompose",
    "complete_graph",
    "connected_components",
    "cycle_graph",
    "disagreement",
    "div",
    "dual_feasibility_gap",
    "dual_norm_algorithm0",
    "dual_norm_bruteforce",
    "emit_csv",
    "erdos_renyi",
    "gossip_limit",
    "gossip_step",
    "grad",
    "harmonic_schedule",
    "is_dual_certificate",
    "laplacian_apply",
    "load_config",
    "load_edge_list",
    "maximize_cut_functional",
    "mc_lambda0_exact",
    "mc_lambda0_upper",
    "metrics_from_trajectory",
    "min_cut",
    "parse_csv",
    "path_graph",
    "perimeter",
    "read_node_field",
    "run",
    "run_experiment",
    "save_edge_list",
    "soft_threshold",
    "stubborn_limit",
    "subgradient_step",
    "tv_norm",
    "uniform_gossip_matrix",
]
