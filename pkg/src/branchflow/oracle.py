"""Independent verification machinery.

``path_walk_simulate`` recomputes the hydraulics with explicit tree walks
(bottom-up demand accumulation, top-down loss accumulation) and no matrices,
so it cross-checks the matrix kernel with a genuinely different algorithm.
``exhaustive_optimize`` enumerates the whole discrete design space for small
instances and is the ground truth the stochastic optimizer is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import PipeCatalog
from .errors import BudgetExceededError
from .feasibility import DesignLimits, ranking_key
from .hydraulics import HydraulicParams, HydraulicState, friction_gradient
from .network import TreeNetwork
from .scoring import Evaluator

__all__ = ["EnumerationBudget", "Optimum", "exhaustive_optimize", "path_walk_simulate"]

_CHUNK = 65536


@dataclass(frozen=True)
class EnumerationBudget:
    """Upper bound on the number of genomes exhaustive search may visit."""

    max_combinations: int = 10_000_000

    def __post_init__(self):
        if self.max_combinations < 1:
            raise ValueError("max_combinations must be positive")


@dataclass(frozen=True)
class Optimum:
    """Result of a complete enumeration."""

    genome: np.ndarray
    cost: float
    feasible: bool
    violation: float


def exhaustive_optimize(network: TreeNetwork, catalog: PipeCatalog,
                        limits: DesignLimits, hydraulic_params: HydraulicParams,
                        budget: EnumerationBudget = EnumerationBudget()) -> Optimum:
    """Enumerate every genome and return the best under the candidate total order.

    Deterministic: equal-cost optima resolve to the lexicographically smallest
    genome. Counting is mixed-radix with pipe 1 as the fastest digit. Raises
    BudgetExceededError without evaluating anything when the space is too big.
    """
    n_pipes = network.pipe_count
    n_cat = len(catalog)
    total = n_cat ** n_pipes
    if total > budget.max_combinations:
        raise BudgetExceededError(
            f"{n_cat}^{n_pipes} = {total} genomes exceed the budget of "
            f"{budget.max_combinations}"
        )

    evaluator = Evaluator(network, catalog, limits, hydraulic_params)
    place = n_cat ** np.arange(n_pipes, dtype=np.int64)

    best_key = None
    best = None
    for start in range(0, total, _CHUNK):
        linear = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        genomes = (linear[:, None] // place) % n_cat
        scores = evaluator.evaluate(genomes)

        if scores.feasible.any():
            pool = np.flatnonzero(scores.feasible)
            pool = pool[scores.costs[pool] == scores.costs[pool].min()]
        else:
            pool = np.flatnonzero(scores.violations == scores.violations.min())
            pool = pool[scores.costs[pool] == scores.costs[pool].min()]
        for i in pool:
            key = ranking_key(
                float(scores.costs[i]), bool(scores.feasible[i]),
                float(scores.violations[i]), tuple(int(g) for g in genomes[i]),
            )
            if best_key is None or key < best_key:
                best_key = key
                best = Optimum(
                    genome=genomes[i].copy(),
                    cost=float(scores.costs[i]),
                    feasible=bool(scores.feasible[i]),
                    violation=float(scores.violations[i]),
                )
    return best


def path_walk_simulate(network: TreeNetwork, diameters: np.ndarray,
                       params: HydraulicParams) -> HydraulicState:
    """Matrix-free reference simulation via explicit tree traversal.

    Flows accumulate bottom-up (children before parents), losses accumulate
    top-down along each supply path. Must agree with ``hydraulics.simulate``.
    """
    diameters = np.asarray(diameters, dtype=float)
    if diameters.shape != (network.pipe_count,):
        raise ValueError(
            f"expected {network.pipe_count} diameters, got shape {diameters.shape}"
        )
    n = network.node_count
    parent = network.parent_node

    depth = [0] * n
    for j in range(n):
        d, cur = 0, j
        while parent[cur] >= 0:
            cur = int(parent[cur])
            d += 1
        depth[j] = d
    deepest_first = sorted(range(n), key=lambda j: -depth[j])

    flows = [float(network.nodes[j].demand) for j in range(n)]
    for j in deepest_first:
        p = int(parent[j])
        if p >= 0:
            flows[p] += flows[j]

    c_hw = params.hazen_williams_coeff
    friction = [
        friction_gradient(flows[i], float(diameters[i]), c_hw, params.flow_exponent)
        for i in range(n)
    ]
    with_fittings = [params.fitting_loss_coeff * h for h in friction]
    losses = [float(network.pipes[i].length) * with_fittings[i] for i in range(n)]

    path_loss = [0.0] * n
    for j in sorted(range(n), key=lambda j: depth[j]):
        p = int(parent[j])
        path_loss[j] = (path_loss[p] if p >= 0 else 0.0) + losses[j]

    heads = [params.reservoir_elevation - path_loss[j] for j in range(n)]
    residuals = [heads[j] - float(network.nodes[j].elevation) for j in range(n)]

    return HydraulicState(
        flows=np.array(flows),
        friction_gradients=np.array(friction),
        friction_fitting_gradients=np.array(with_fittings),
        pipe_head_losses=np.array(losses),
        nodal_heads=np.array(heads),
        residual_heads=np.array(residuals),
    )
