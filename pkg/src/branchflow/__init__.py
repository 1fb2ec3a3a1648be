"""Hydraulic solver and least-cost pipe sizing for tree-shaped water networks."""

from .costs import (
    CostReport,
    CostTable,
    PipeCatalog,
    build_catalog,
    lagrange_interpolate,
    lagrange_interpolate_direct,
    network_cost,
    parse_catalog,
    parse_cost_table,
    serialize_cost_table,
)
from .errors import BranchflowError, BudgetExceededError, ParseError, ValidationError
from .feasibility import (
    DesignLimits,
    FeasibilityReport,
    compare_solutions,
    evaluate_constraints,
    solution_key,
)
from .hbmo import (
    HbmoParams,
    OptimizeResult,
    RunHistory,
    breed,
    mating_flight,
    mutate,
    optimize,
    random_genome,
)
from .hydraulics import (
    HydraulicParams,
    HydraulicState,
    apply_fitting_losses,
    build_flow_transform,
    build_head_transform,
    compute_flows,
    friction_gradient,
    friction_gradients,
    nodal_heads,
    pipe_head_losses,
    residual_heads,
    simulate,
)
from .network import (
    NodeRecord,
    PipeRecord,
    ReservoirRecord,
    TreeNetwork,
    canonicalize,
    downstream_nodes,
    parse_network,
    path_to_root,
    serialize_network,
    validate_tree,
)
from .oracle import EnumerationBudget, Optimum, exhaustive_optimize, path_walk_simulate

__version__ = "0.1.0"

__all__ = [
    "BranchflowError",
    "BudgetExceededError",
    "ParseError",
    "ValidationError",
    "NodeRecord",
    "ReservoirRecord",
    "PipeRecord",
    "TreeNetwork",
    "parse_network",
    "serialize_network",
    "validate_tree",
    "canonicalize",
    "downstream_nodes",
    "path_to_root",
    "HydraulicParams",
    "HydraulicState",
    "build_flow_transform",
    "build_head_transform",
    "compute_flows",
    "friction_gradient",
    "friction_gradients",
    "apply_fitting_losses",
    "pipe_head_losses",
    "nodal_heads",
    "residual_heads",
    "simulate",
    "CostTable",
    "PipeCatalog",
    "CostReport",
    "lagrange_interpolate",
    "lagrange_interpolate_direct",
    "build_catalog",
    "network_cost",
    "parse_cost_table",
    "parse_catalog",
    "serialize_cost_table",
    "DesignLimits",
    "FeasibilityReport",
    "evaluate_constraints",
    "solution_key",
    "compare_solutions",
    "HbmoParams",
    "RunHistory",
    "OptimizeResult",
    "random_genome",
    "mating_flight",
    "breed",
    "mutate",
    "optimize",
    "EnumerationBudget",
    "Optimum",
    "exhaustive_optimize",
    "path_walk_simulate",
    "__version__",
]
