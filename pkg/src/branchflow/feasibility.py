"""Design-constraint evaluation and the candidate ordering used by the optimizer.

Two constraint families: every pipe's friction-and-fitting loss gradient must
stay at or below the allowed maximum, and every node's residual head must
reach the required minimum. Candidates are ranked feasibility-first: any
feasible solution beats any infeasible one, feasible solutions compare by
cost, infeasible ones by a normalized violation measure. Boundary equality
counts as satisfied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hydraulics import HydraulicState

__all__ = [
    "DesignLimits",
    "FeasibilityReport",
    "evaluate_constraints",
    "ranking_key",
    "solution_key",
    "compare_solutions",
]


@dataclass(frozen=True)
class DesignLimits:
    """Constraint bounds: minimum residual head (m), maximum loss gradient (m/m)."""

    min_residual_head: float
    max_loss_gradient: float

    def __post_init__(self):
        if self.min_residual_head <= 0:
            raise ValueError("min_residual_head must be > 0")
        if self.max_loss_gradient <= 0:
            raise ValueError("max_loss_gradient must be > 0")


@dataclass(frozen=True)
class FeasibilityReport:
    """Per-element verdicts plus an aggregate violation measure.

    ``violation`` sums the relative excess of every broken constraint
    (excess over the gradient cap divided by the cap; shortfall below the
    head floor divided by the floor), so it is 0 exactly when ``feasible``.
    """

    pipe_gradients: np.ndarray
    pipe_satisfied: np.ndarray
    node_residual_heads: np.ndarray
    node_satisfied: np.ndarray
    feasible: bool
    violation: float


def evaluate_constraints(state: HydraulicState, limits: DesignLimits) -> FeasibilityReport:
    """Check one hydraulic state against the design limits."""
    g = np.asarray(state.friction_fitting_gradients, dtype=float)
    hr = np.asarray(state.residual_heads, dtype=float)
    g_max = limits.max_loss_gradient
    h_min = limits.min_residual_head

    pipe_ok = g <= g_max
    node_ok = hr >= h_min
    violation = float(
        (np.maximum(0.0, g - g_max) / g_max).sum()
        + (np.maximum(0.0, h_min - hr) / h_min).sum()
    )
    feasible = bool(pipe_ok.all() and node_ok.all())
    return FeasibilityReport(
        pipe_gradients=g,
        pipe_satisfied=pipe_ok,
        node_residual_heads=hr,
        node_satisfied=node_ok,
        feasible=feasible,
        violation=violation,
    )


def ranking_key(cost: float, feasible: bool, violation: float,
                genome: tuple[int, ...] = ()) -> tuple:
    """Sort key realizing the candidate total order.

    Feasible before infeasible; feasible ties by cost; infeasible ties by
    violation then cost; remaining ties break lexicographically on the genome.
    """
    if feasible:
        return (0, 0.0, cost, tuple(genome))
    return (1, violation, cost, tuple(genome))


def solution_key(cost: float, report: FeasibilityReport,
                 genome: tuple[int, ...] = ()) -> tuple:
    """``ranking_key`` for a full ``FeasibilityReport``."""
    return ranking_key(cost, report.feasible, report.violation, genome)


def compare_solutions(a, b) -> int:
    """Three-way comparison of ``(cost, report)`` or ``(cost, report, genome)`` tuples."""
    ka = solution_key(*a) if len(a) == 3 else solution_key(a[0], a[1])
    kb = solution_key(*b) if len(b) == 3 else solution_key(b[0], b[1])
    return (ka > kb) - (ka < kb)
