"""Tree-network hydraulic kernel built on 0/1 transform matrices.

The layout of a rooted tree fixes two incidence-style matrices: a pipe-by-node
matrix that turns nodal demands into pipe flows (each pipe carries the sum of
all demands downstream of it), and its transpose, a node-by-pipe matrix that
sums per-pipe head losses along each node's supply path. One matrix-vector
product each way replaces any iterative balancing: flows, loss gradients, head
losses, nodal heads and residual heads all follow in closed form.

Field units: demands in m3/day, diameters in mm, lengths in m. The
Hazen-Williams gradient is evaluated in SI internally (m3/s and m via the
fixed conversions /86400 and /1000).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import TreeNetwork, downstream_nodes

__all__ = [
    "HAZEN_WILLIAMS_NUMERATOR",
    "FLOW_EXPONENT",
    "DIAMETER_EXPONENT",
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
]

HAZEN_WILLIAMS_NUMERATOR = 10.666
# Flow exponent as carried by the bundled reference data; the common textbook
# variant 1.852 can be requested through HydraulicParams.
FLOW_EXPONENT = 1.85
DIAMETER_EXPONENT = 4.87

SECONDS_PER_DAY = 86400.0
MM_PER_M = 1000.0


@dataclass(frozen=True)
class HydraulicParams:
    """Loss-model coefficients and the source head."""

    hazen_williams_coeff: float
    fitting_loss_coeff: float
    reservoir_elevation: float
    flow_exponent: float = FLOW_EXPONENT

    def __post_init__(self):
        if self.hazen_williams_coeff <= 0:
            raise ValueError("hazen_williams_coeff must be > 0")
        if self.fitting_loss_coeff < 1:
            raise ValueError("fitting_loss_coeff must be >= 1")

    @classmethod
    def for_network(cls, network: TreeNetwork, hazen_williams_coeff: float,
                    fitting_loss_coeff: float) -> "HydraulicParams":
        return cls(hazen_williams_coeff, fitting_loss_coeff, network.reservoir.elevation)


@dataclass(frozen=True)
class HydraulicState:
    """All per-run vectors for one diameter assignment."""

    flows: np.ndarray                       # m3/day per pipe
    friction_gradients: np.ndarray          # m/m per pipe, wall friction only
    friction_fitting_gradients: np.ndarray  # m/m per pipe, fittings folded in
    pipe_head_losses: np.ndarray            # m per pipe
    nodal_heads: np.ndarray                 # m per node
    residual_heads: np.ndarray              # m per node (head minus elevation)


def build_flow_transform(network: TreeNetwork) -> np.ndarray:
    """Pipe-by-node 0/1 matrix: entry (i, j) = 1 iff node j is downstream of pipe i."""
    m = np.zeros((network.pipe_count, network.node_count))
    for i in range(network.pipe_count):
        m[i, sorted(downstream_nodes(network, i))] = 1.0
    return m


def build_head_transform(network: TreeNetwork) -> np.ndarray:
    """Node-by-pipe 0/1 matrix: entry (j, i) = 1 iff pipe i lies on node j's supply path.

    Equals the transpose of ``build_flow_transform`` under canonical numbering.
    """
    m = np.zeros((network.node_count, network.pipe_count))
    for j in range(network.node_count):
        path = [j]
        cur = int(network.parent_node[j])
        while cur >= 0:
            path.append(cur)
            cur = int(network.parent_node[cur])
        m[j, path] = 1.0
    return m


def compute_flows(flow_transform: np.ndarray, demands: np.ndarray) -> np.ndarray:
    """Pipe flows (m3/day) from nodal demands: one matrix-vector product."""
    demands = np.asarray(demands, dtype=float)
    if flow_transform.shape[1] != demands.shape[0]:
        raise ValueError(
            f"demand vector length {demands.shape[0]} does not match "
            f"{flow_transform.shape[1]} nodes"
        )
    return flow_transform @ demands


def friction_gradient(flow: float, diameter: float, c_hw: float,
                      flow_exponent: float = FLOW_EXPONENT) -> float:
    """Hazen-Williams friction loss gradient (m per m of pipe).

    ``flow`` in m3/day, ``diameter`` in mm. Evaluates
    10.666 * Q^a / (C^a * d^4.87) with Q in m3/s and d in m, a = flow_exponent.
    """
    if diameter <= 0:
        raise ValueError("diameter must be > 0")
    if flow < 0:
        raise ValueError("flow must be >= 0")
    q = flow / SECONDS_PER_DAY
    d = diameter / MM_PER_M
    return (
        HAZEN_WILLIAMS_NUMERATOR
        * q ** flow_exponent
        / (c_hw ** flow_exponent * d ** DIAMETER_EXPONENT)
    )


def friction_gradients(flows: np.ndarray, diameters: np.ndarray,
                       params: HydraulicParams) -> np.ndarray:
    """Element-wise friction gradients (m/m per pipe).

    ``diameters`` may carry leading batch dimensions; it broadcasts against
    ``flows`` over the trailing pipe axis.
    """
    flows = np.asarray(flows, dtype=float)
    diameters = np.asarray(diameters, dtype=float)
    if diameters.shape[-1] != flows.shape[-1]:
        raise ValueError(
            f"diameter vector length {diameters.shape[-1]} does not match "
            f"{flows.shape[-1]} pipes"
        )
    if np.any(diameters <= 0):
        raise ValueError("diameters must be > 0")
    a = params.flow_exponent
    q = flows / SECONDS_PER_DAY
    d = diameters / MM_PER_M
    return (
        HAZEN_WILLIAMS_NUMERATOR
        * q ** a
        / (params.hazen_williams_coeff ** a * d ** DIAMETER_EXPONENT)
    )


def apply_fitting_losses(friction: np.ndarray, c_ft: float) -> np.ndarray:
    """Fold minor (fitting) losses into the friction gradient: a uniform multiplier."""
    if c_ft < 1:
        raise ValueError("fitting loss coefficient must be >= 1")
    return c_ft * np.asarray(friction, dtype=float)


def pipe_head_losses(lengths: np.ndarray, gradients: np.ndarray) -> np.ndarray:
    """Head loss per pipe (m): length times loss gradient, element-wise."""
    lengths = np.asarray(lengths, dtype=float)
    gradients = np.asarray(gradients, dtype=float)
    if lengths.shape[-1] != gradients.shape[-1]:
        raise ValueError(
            f"length vector length {lengths.shape[-1]} does not match "
            f"{gradients.shape[-1]} gradients"
        )
    return lengths * gradients


def nodal_heads(reservoir_elevation: float, head_transform: np.ndarray,
                losses: np.ndarray) -> np.ndarray:
    """Hydraulic head at each node: source head minus the path-summed losses."""
    losses = np.asarray(losses, dtype=float)
    if head_transform.shape[-1] != losses.shape[-1]:
        raise ValueError(
            f"loss vector length {losses.shape[-1]} does not match "
            f"{head_transform.shape[-1]} pipes"
        )
    return reservoir_elevation - losses @ head_transform.T


def residual_heads(heads: np.ndarray, elevations: np.ndarray) -> np.ndarray:
    """Deliverable pressure head: hydraulic head minus ground elevation."""
    heads = np.asarray(heads, dtype=float)
    elevations = np.asarray(elevations, dtype=float)
    if heads.shape[-1] != elevations.shape[-1]:
        raise ValueError(
            f"head vector length {heads.shape[-1]} does not match "
            f"{elevations.shape[-1]} elevations"
        )
    return heads - elevations


def simulate(network: TreeNetwork, diameters: np.ndarray,
             params: HydraulicParams) -> HydraulicState:
    """Run the full kernel for one diameter assignment (mm per pipe).

    Flows do not depend on diameters in a tree, so the chain is flows ->
    friction gradients -> fitting-inclusive gradients -> per-pipe losses ->
    nodal heads -> residual heads, each a closed-form vector step.
    """
    diameters = np.asarray(diameters, dtype=float)
    if diameters.shape != (network.pipe_count,):
        raise ValueError(
            f"expected {network.pipe_count} diameters, got shape {diameters.shape}"
        )
    t_flow = build_flow_transform(network)
    t_head = build_head_transform(network)
    flows = compute_flows(t_flow, network.demands)
    friction = friction_gradients(flows, diameters, params)
    with_fittings = apply_fitting_losses(friction, params.fitting_loss_coeff)
    losses = pipe_head_losses(network.lengths, with_fittings)
    heads = nodal_heads(params.reservoir_elevation, t_head, losses)
    residuals = residual_heads(heads, network.elevations)
    return HydraulicState(
        flows=flows,
        friction_gradients=friction,
        friction_fitting_gradients=with_fittings,
        pipe_head_losses=losses,
        nodal_heads=heads,
        residual_heads=residuals,
    )
