"""Batched genome scoring shared by the optimizer and the exhaustive search.

In a tree the pipe flows never depend on diameters, so for a fixed network and
catalog every per-pipe gradient and cost contribution can be tabulated once
per (catalog index, pipe) pair. Scoring a batch of genomes then reduces to
fancy indexing plus one matrix product for the residual heads, which keeps
candidate evaluation at array speed while staying element-for-element equal to
the one-candidate pipeline (simulate, then cost, then constraint check).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import PipeCatalog, network_cost
from .feasibility import DesignLimits, evaluate_constraints, ranking_key
from .hydraulics import (
    HydraulicParams,
    apply_fitting_losses,
    build_flow_transform,
    build_head_transform,
    compute_flows,
    friction_gradients,
    simulate,
)
from .network import TreeNetwork

__all__ = ["ScoredGenome", "BatchScores", "Evaluator"]


@dataclass(frozen=True)
class ScoredGenome:
    """A genome with its evaluated cost and constraint outcome."""

    genome: np.ndarray
    cost: float
    feasible: bool
    violation: float

    @property
    def key(self) -> tuple:
        return ranking_key(self.cost, self.feasible, self.violation,
                           tuple(int(g) for g in self.genome))


@dataclass(frozen=True)
class BatchScores:
    """Vectorized scores for a batch of genomes."""

    costs: np.ndarray
    feasible: np.ndarray
    violations: np.ndarray


class Evaluator:
    """Precomputed scoring tables for one (network, catalog, limits, params) run."""

    def __init__(self, network: TreeNetwork, catalog: PipeCatalog,
                 limits: DesignLimits, params: HydraulicParams):
        self.network = network
        self.catalog = catalog
        self.limits = limits
        self.params = params

        self.flows = compute_flows(build_flow_transform(network), network.demands)
        self._head_transform_t = build_head_transform(network).T
        self._head_budget = params.reservoir_elevation - network.elevations

        # Per (catalog index, pipe) tables: loss gradient, head loss, cost share.
        diam_grid = np.broadcast_to(
            catalog.diameters[:, None], (len(catalog), network.pipe_count)
        )
        self._gradients = apply_fitting_losses(
            friction_gradients(self.flows, diam_grid, params),
            params.fitting_loss_coeff,
        )
        self._losses = network.lengths * self._gradients
        self._costs = catalog.unit_costs[:, None] * network.lengths

        self._pipe_axis = np.arange(network.pipe_count)

    def evaluate(self, genomes: np.ndarray) -> BatchScores:
        """Score a (batch, pipe_count) array of catalog-index genomes."""
        genomes = np.atleast_2d(np.asarray(genomes, dtype=np.intp))
        g = self._gradients[genomes, self._pipe_axis]
        f = self._losses[genomes, self._pipe_axis]
        hr = self._head_budget - f @ self._head_transform_t
        g_max = self.limits.max_loss_gradient
        h_min = self.limits.min_residual_head
        violations = (
            (np.maximum(0.0, g - g_max) / g_max).sum(axis=1)
            + (np.maximum(0.0, h_min - hr) / h_min).sum(axis=1)
        )
        feasible = (g <= g_max).all(axis=1) & (hr >= h_min).all(axis=1)
        costs = self._costs[genomes, self._pipe_axis].sum(axis=1)
        return BatchScores(costs=costs, feasible=feasible, violations=violations)

    def score_batch(self, genomes: np.ndarray) -> list[ScoredGenome]:
        genomes = np.atleast_2d(np.asarray(genomes, dtype=np.intp))
        s = self.evaluate(genomes)
        return [
            ScoredGenome(genomes[i].copy(), float(s.costs[i]),
                         bool(s.feasible[i]), float(s.violations[i]))
            for i in range(genomes.shape[0])
        ]

    def score_one(self, genome: np.ndarray) -> ScoredGenome:
        """Score one genome through the full single-candidate pipeline.

        Used for final re-checks: no tables, no caching, just the plain
        simulate -> network cost -> constraint evaluation composition.
        """
        genome = np.asarray(genome, dtype=np.intp)
        diameters = self.catalog.diameters[genome]
        state = simulate(self.network, diameters, self.params)
        report = evaluate_constraints(state, self.limits)
        cost = network_cost(diameters, self.network.lengths, self.catalog)
        return ScoredGenome(genome.copy(), cost.total, report.feasible, report.violation)
