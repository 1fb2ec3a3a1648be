"""Randomized-case generators and property checks shared by the test modules.

Each ``check_*`` function runs a full randomized suite (default 100 cases)
and raises AssertionError on the first violation; it returns the number of
cases run so callers can report coverage.
"""

import numpy as np

from branchflow import (
    DesignLimits,
    HydraulicParams,
    NodeRecord,
    PipeRecord,
    ReservoirRecord,
    TreeNetwork,
    build_flow_transform,
    build_head_transform,
    compare_solutions,
    downstream_nodes,
    evaluate_constraints,
    parse_network,
    path_to_root,
    path_walk_simulate,
    serialize_network,
    simulate,
)
from branchflow.feasibility import FeasibilityReport


def random_tree(rng, min_nodes=1, max_nodes=50, zero_demand_fraction=0.15):
    """A random canonical tree: node j's parent has a smaller index (or the root)."""
    n = int(rng.integers(min_nodes, max_nodes + 1))
    reservoir = ReservoirRecord("N0", float(rng.uniform(50.0, 500.0)))
    nodes = []
    pipes = []
    for j in range(n):
        demand = 0.0 if rng.random() < zero_demand_fraction else float(rng.uniform(1.0, 500.0))
        elevation = float(reservoir.elevation - rng.uniform(5.0, 60.0))
        nodes.append(NodeRecord(f"N{j + 1}", elevation, demand))
        upstream = "N0" if j == 0 else f"N{int(rng.integers(0, j)) + 1}"
        # extra chances to hang directly off the reservoir keep trees bushy
        if j > 0 and rng.random() < 0.2:
            upstream = "N0"
        pipes.append(PipeRecord(f"P{j + 1}", upstream, f"N{j + 1}", float(rng.uniform(10.0, 1500.0))))
    return TreeNetwork(reservoir, tuple(nodes), tuple(pipes))


def random_params(network, rng):
    return HydraulicParams.for_network(
        network,
        hazen_williams_coeff=float(rng.uniform(80.0, 150.0)),
        fitting_loss_coeff=float(rng.uniform(1.0, 1.5)),
    )


def random_diameters(rng, count):
    return rng.uniform(40.0, 400.0, size=count)


def check_transpose_duality(rng, cases=100, max_nodes=200):
    for _ in range(cases):
        net = random_tree(rng, max_nodes=max_nodes)
        t_flow = build_flow_transform(net)
        t_head = build_head_transform(net)
        assert np.array_equal(t_head, t_flow.T), "head transform is not the flow transform transposed"
        # set-level duality: node j downstream of pipe i <=> pipe i on j's path
        for i in range(min(net.pipe_count, 8)):
            for j in downstream_nodes(net, i):
                assert i in path_to_root(net, j)
    return cases


def check_flow_conservation(rng, cases=100):
    for _ in range(cases):
        net = random_tree(rng)
        flows = build_flow_transform(net) @ net.demands
        root_total = sum(flows[j] for j in net.root_children)
        np.testing.assert_allclose(root_total, net.demands.sum(), rtol=1e-12)
        for v in range(net.node_count):
            expected = net.demands[v] + sum(flows[c] for c in net.children[v])
            np.testing.assert_allclose(flows[v], expected, rtol=1e-12)
    return cases


def check_pathwalk_equivalence(rng, cases=100):
    worst = 0.0
    for _ in range(cases):
        net = random_tree(rng, max_nodes=50)
        params = random_params(net, rng)
        diameters = random_diameters(rng, net.pipe_count)
        a = simulate(net, diameters, params)
        b = path_walk_simulate(net, diameters, params)
        for x, y in (
            (a.flows, b.flows),
            (a.friction_fitting_gradients, b.friction_fitting_gradients),
            (a.pipe_head_losses, b.pipe_head_losses),
            (a.residual_heads, b.residual_heads),
        ):
            np.testing.assert_allclose(x, y, rtol=1e-9, atol=1e-12)
            scale = np.maximum(np.abs(x), 1e-12)
            worst = max(worst, float(np.max(np.abs(x - y) / scale)))
    assert worst <= 1e-9
    return cases


def check_diameter_monotonicity(rng, cases=100):
    limits = DesignLimits(min_residual_head=10.0, max_loss_gradient=0.005)
    for _ in range(cases):
        net = random_tree(rng, min_nodes=2, max_nodes=30, zero_demand_fraction=0.0)
        params = random_params(net, rng)
        diameters = random_diameters(rng, net.pipe_count)
        base = simulate(net, diameters, params)
        i = int(rng.integers(0, net.pipe_count))
        grown = diameters.copy()
        grown[i] *= float(rng.uniform(1.05, 2.0))
        after = simulate(net, grown, params)
        assert after.friction_fitting_gradients[i] < base.friction_fitting_gradients[i]
        mask = np.arange(net.pipe_count) != i
        np.testing.assert_array_equal(
            after.friction_fitting_gradients[mask], base.friction_fitting_gradients[mask]
        )
        assert np.all(after.residual_heads >= base.residual_heads - 1e-12)
        # repair is monotone: upsizing a pipe never worsens the violation measure
        worse = evaluate_constraints(base, limits).violation
        better = evaluate_constraints(after, limits).violation
        assert better <= worse + 1e-12
    return cases


def check_demand_scaling(rng, cases=100):
    for _ in range(cases):
        net = random_tree(rng, zero_demand_fraction=0.0)
        params = random_params(net, rng)
        diameters = random_diameters(rng, net.pipe_count)
        base = simulate(net, diameters, params)
        doubled = TreeNetwork(
            net.reservoir,
            tuple(NodeRecord(n.id, n.elevation, 2.0 * n.demand) for n in net.nodes),
            net.pipes,
        )
        after = simulate(doubled, diameters, params)
        factor = 2.0 ** params.flow_exponent
        np.testing.assert_allclose(
            after.friction_gradients, factor * base.friction_gradients, rtol=1e-9
        )
    return cases


def _random_report(rng):
    feasible = bool(rng.random() < 0.5)
    violation = 0.0 if feasible else float(rng.uniform(0.0001, 3.0))
    flag = np.array([feasible])
    return FeasibilityReport(
        pipe_gradients=np.array([0.0]),
        pipe_satisfied=flag,
        node_residual_heads=np.array([0.0]),
        node_satisfied=flag,
        feasible=feasible,
        violation=violation,
    )


def check_total_order(rng, cases=100):
    for _ in range(cases):
        triple = []
        for _ in range(3):
            cost = float(rng.choice([10.0, 50.0, 50.0, 99.0]))
            genome = tuple(int(g) for g in rng.integers(0, 3, size=3))
            triple.append((cost, _random_report(rng), genome))
        a, b, c = triple
        assert compare_solutions(a, a) == 0
        assert compare_solutions(a, b) == -compare_solutions(b, a)
        # transitivity over the sampled triple
        if compare_solutions(a, b) <= 0 and compare_solutions(b, c) <= 0:
            assert compare_solutions(a, c) <= 0
        # totality: any pair is ordered or identical-keyed
        assert compare_solutions(a, b) in (-1, 0, 1)
    return cases


def check_roundtrip(rng, cases=100):
    for _ in range(cases):
        net = random_tree(rng)
        again = parse_network(serialize_network(net))
        assert again == net
    return cases


ALL_PROPERTY_CHECKS = (
    check_transpose_duality,
    check_flow_conservation,
    check_pathwalk_equivalence,
    check_diameter_monotonicity,
    check_demand_scaling,
    check_total_order,
    check_roundtrip,
)
