"""Command-line interface.

Commands: ``simulate``, ``optimize``, ``interpolate-costs``, ``verify``,
``exhaustive``. All report files are CSV with a header row; numeric report
values are written with 4 decimal places unless ``--precision full`` is given.
Exit codes: 0 success, 2 parse/file error, 3 validation or value error,
4 best solution infeasible, 5 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, fields as dataclass_fields
from pathlib import Path

import numpy as np

from . import datasets
from .costs import (
    build_catalog,
    lagrange_interpolate,
    network_cost,
    parse_catalog,
    parse_cost_table,
    serialize_cost_table,
)
from .errors import BudgetExceededError, ParseError, ValidationError
from .feasibility import DesignLimits, FeasibilityReport, evaluate_constraints
from .hbmo import HbmoParams, OptimizeResult, optimize
from .hydraulics import HydraulicParams, HydraulicState, simulate
from .network import TreeNetwork, parse_network
from .oracle import EnumerationBudget, exhaustive_optimize
from .datasets import read_diameters, serialize_diameters

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_BUDGET = 5

_CONFIG_FLOAT_KEYS = {
    "min_residual_head",
    "max_loss_gradient",
    "hazen_williams_coeff",
    "fitting_loss_coeff",
    "speed_initial_min",
    "speed_initial_max",
    "speed_decay",
    "speed_min",
    "crossover_queen_bias",
    "mutation_rate",
}
_CONFIG_INT_KEYS = {
    "drone_count",
    "spermatheca_capacity",
    "brood_count",
    "mating_flights",
    "max_evaluations",
    "seed",
}


@dataclass
class RunConfig:
    """Everything a command needs: limits, coefficients, search parameters."""

    limits: DesignLimits
    hazen_williams_coeff: float
    fitting_loss_coeff: float
    hbmo: HbmoParams

    def params_for(self, network: TreeNetwork) -> HydraulicParams:
        return HydraulicParams.for_network(
            network, self.hazen_williams_coeff, self.fitting_loss_coeff
        )


def parse_config(text: str, seed_override: int | None = None) -> RunConfig:
    """Parse ``key = value`` lines; unknown keys are rejected."""
    values: dict[str, float | int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if key in _CONFIG_FLOAT_KEYS:
            caster = float
        elif key in _CONFIG_INT_KEYS:
            caster = int
        else:
            raise ParseError(f"unknown configuration key {key!r}", lineno)
        if key in values:
            raise ParseError(f"duplicate configuration key {key!r}", lineno)
        try:
            values[key] = caster(value)
        except ValueError:
            raise ParseError(f"bad value for {key}: {value!r}", lineno) from None
    return _build_config(values, seed_override)


def _build_config(values: dict, seed_override: int | None) -> RunConfig:
    limits = DesignLimits(
        min_residual_head=values.pop("min_residual_head",
                                     datasets.DEFAULT_LIMITS.min_residual_head),
        max_loss_gradient=values.pop("max_loss_gradient",
                                     datasets.DEFAULT_LIMITS.max_loss_gradient),
    )
    c_hw = values.pop("hazen_williams_coeff", datasets.DEFAULT_HAZEN_WILLIAMS)
    c_ft = values.pop("fitting_loss_coeff", datasets.DEFAULT_FITTING_LOSS)

    speed_lo = values.pop("speed_initial_min", None)
    speed_hi = values.pop("speed_initial_max", None)
    if (speed_lo is None) != (speed_hi is None):
        raise ParseError("speed_initial_min and speed_initial_max must be given together")
    hbmo_kwargs = {k: v for k, v in values.items()
                   if k in {f.name for f in dataclass_fields(HbmoParams)}}
    if speed_lo is not None:
        hbmo_kwargs["speed_initial_range"] = (speed_lo, speed_hi)
    if seed_override is not None:
        hbmo_kwargs["seed"] = seed_override
    try:
        hbmo = HbmoParams(**hbmo_kwargs)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    return RunConfig(limits=limits, hazen_williams_coeff=c_hw,
                     fitting_loss_coeff=c_ft, hbmo=hbmo)


def _load_config(args) -> RunConfig:
    seed = getattr(args, "seed", None)
    if getattr(args, "config", None):
        return parse_config(_read_file(args.config), seed_override=seed)
    return parse_config("", seed_override=seed)


def _read_file(path: str | Path) -> str:
    p = Path(path)
    if not p.exists():
        raise ParseError(f"file not found: {p}")
    return p.read_text(encoding="utf-8")


def _fmt(value: float, precision: str) -> str:
    if precision == "full":
        return repr(float(value))
    return f"{value:.4f}"


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text, encoding="utf-8")
    return path


def _pipe_report(network: TreeNetwork, diameters: np.ndarray, state: HydraulicState,
                 report: FeasibilityReport, precision: str) -> str:
    lines = ["pipe_id,diameter_mm,flow_m3_per_day,g_ff,satisfied"]
    for i, pipe in enumerate(network.pipes):
        lines.append(
            f"{pipe.id},{diameters[i]:g},{_fmt(state.flows[i], precision)},"
            f"{_fmt(state.friction_fitting_gradients[i], precision)},"
            f"{'yes' if report.pipe_satisfied[i] else 'no'}"
        )
    return "\n".join(lines) + "\n"


def _node_report(network: TreeNetwork, state: HydraulicState,
                 report: FeasibilityReport, precision: str) -> str:
    lines = ["node_id,head_m,residual_head_m,satisfied"]
    for j, node in enumerate(network.nodes):
        lines.append(
            f"{node.id},{_fmt(state.nodal_heads[j], precision)},"
            f"{_fmt(state.residual_heads[j], precision)},"
            f"{'yes' if report.node_satisfied[j] else 'no'}"
        )
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    config = _load_config(args)
    network = parse_network(_read_file(args.network))
    diameters = read_diameters(_read_file(args.diameters), network)
    params = config.params_for(network)
    state = simulate(network, diameters, params)
    report = evaluate_constraints(state, config.limits)

    out = Path(args.out)
    pipes = _write(out, "pipes.csv", _pipe_report(network, diameters, state, report, args.precision))
    nodes = _write(out, "nodes.csv", _node_report(network, state, report, args.precision))
    print(f"wrote {pipes} and {nodes}")
    print(f"feasible: {'yes' if report.feasible else 'no'} "
          f"(violation {_fmt(report.violation, args.precision)})")
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_optimize(args) -> int:
    config = _load_config(args)
    network = parse_network(_read_file(args.network))
    catalog = parse_catalog(_read_file(args.catalog))
    params = config.params_for(network)

    started = time.perf_counter()
    result: OptimizeResult = optimize(network, catalog, config.limits, params, config.hbmo)
    elapsed = time.perf_counter() - started

    out = Path(args.out)
    diameters = catalog.diameters[result.genome]
    _write(out, "solution.csv", serialize_diameters(network, diameters))
    history_lines = ["generation,best_cost,best_feasible"]
    history_lines += [
        f"{rec.generation},{_fmt(rec.best_cost, args.precision)},"
        f"{'yes' if rec.best_feasible else 'no'}"
        for rec in result.history.generations
    ]
    _write(out, "history.csv", "\n".join(history_lines) + "\n")
    _write(out, "summary.csv", _summary_csv(result, config.hbmo.seed, args.precision))

    state = simulate(network, diameters, params)
    report = evaluate_constraints(state, config.limits)
    _write(out, "pipes.csv", _pipe_report(network, diameters, state, report, args.precision))
    _write(out, "nodes.csv", _node_report(network, state, report, args.precision))

    print(f"best cost: {_fmt(result.cost, args.precision)} "
          f"({'feasible' if result.report.feasible else 'infeasible'}), "
          f"{result.history.total_evaluations} evaluations in {elapsed:.2f}s, "
          f"stopped by {result.history.terminated}")
    return EXIT_OK if result.report.feasible else EXIT_INFEASIBLE


def _summary_csv(result: OptimizeResult, seed: int, precision: str) -> str:
    lines = [
        "key,value",
        f"cost,{_fmt(result.cost, precision)}",
        f"feasible,{'yes' if result.report.feasible else 'no'}",
        f"violation,{_fmt(result.report.violation, precision)}",
        f"evaluations,{result.history.total_evaluations}",
        f"terminated,{result.history.terminated}",
        f"seed,{seed}",
    ]
    return "\n".join(lines) + "\n"


def cmd_interpolate_costs(args) -> int:
    table = parse_cost_table(_read_file(args.table))
    diameters = [float(tok) for tok in args.diameters.split(",") if tok.strip()]
    if not diameters:
        raise ParseError("no diameters given")
    catalog = build_catalog(table, diameters)
    path = _write(Path(args.out), "catalog.costs", serialize_cost_table(catalog))
    for d, c in zip(catalog.diameters, catalog.unit_costs):
        print(f"{d:g} mm -> {_fmt(c, args.precision)}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    root = args.data
    network = datasets.load_network("warapitiya", root)
    table = datasets.load_cost_table(root)
    catalog = datasets.load_catalog(root)
    best = datasets.load_diameters("warapitiya_best.csv", network, root)
    nwsdb = datasets.load_diameters("warapitiya_nwsdb.csv", network, root)
    ref_g = datasets.load_reference_pipe_gradients(root)
    ref_hr = datasets.load_reference_node_heads(root)
    params = datasets.default_params(network)

    checks: list[tuple[str, float, float]] = []  # name, max deviation, tolerance

    interp_dev = max(
        abs(lagrange_interpolate(table, d) - c)
        for d, c in zip(catalog.diameters, catalog.unit_costs)
    )
    checks.append(("catalog interpolation", interp_dev, 1e-3))

    best_cost = network_cost(best, network.lengths, catalog).total
    nwsdb_cost = network_cost(nwsdb, network.lengths, catalog).total
    cost_dev = max(abs(best_cost - 100172.0), abs(nwsdb_cost - 107588.0))
    checks.append(("solution costs", cost_dev, 1.0))

    state = simulate(network, best, params)
    g_dev = max(
        abs(state.friction_fitting_gradients[i] - ref_g[p.id])
        for i, p in enumerate(network.pipes)
    )
    checks.append(("pipe gradients", g_dev, 1e-4))

    hr_dev = max(
        abs(state.residual_heads[j] - ref_hr[n.id])
        for j, n in enumerate(network.nodes)
    )
    checks.append(("node residual heads", hr_dev, 1e-2))

    all_ok = True
    for name, dev, tol in checks:
        ok = dev <= tol
        all_ok &= ok
        print(f"{name}: {'PASS' if ok else 'FAIL'} (max deviation {dev:.6g}, tolerance {tol:g})")
    return EXIT_OK if all_ok else 1


def cmd_exhaustive(args) -> int:
    config = _load_config(args)
    network = parse_network(_read_file(args.network))
    catalog = parse_catalog(_read_file(args.catalog))
    params = config.params_for(network)
    budget = EnumerationBudget(max_combinations=args.max_combinations)

    optimum = exhaustive_optimize(network, catalog, config.limits, params, budget)

    out = Path(args.out)
    diameters = catalog.diameters[optimum.genome]
    _write(out, "optimum.csv", serialize_diameters(network, diameters))
    lines = [
        "key,value",
        f"cost,{_fmt(optimum.cost, args.precision)}",
        f"feasible,{'yes' if optimum.feasible else 'no'}",
        f"combinations,{len(catalog) ** network.pipe_count}",
    ]
    _write(out, "summary.csv", "\n".join(lines) + "\n")
    print(f"optimum cost: {_fmt(optimum.cost, args.precision)} "
          f"({'feasible' if optimum.feasible else 'infeasible'})")
    return EXIT_OK if optimum.feasible else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branchflow",
        description="Hydraulic simulation and least-cost pipe sizing for tree networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, network=True, catalog=False):
        if network:
            p.add_argument("--network", required=True, help="network file")
        if catalog:
            p.add_argument("--catalog", required=True, help="catalog file")
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--seed", type=int,
                       help="search seed (overrides config; only optimize uses it)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--precision", choices=("4", "full"), default="4",
                       help="report precision: 4 decimals (default) or full")

    p = sub.add_parser("simulate", help="hydraulic report for a diameter assignment")
    common(p)
    p.add_argument("--diameters", required=True, help="pipe_id,diameter_mm CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="search for the least-cost feasible assignment")
    common(p, catalog=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("interpolate-costs", help="price commercial sizes off a cost table")
    common(p, network=False)
    p.add_argument("--table", required=True, help="base cost table file")
    p.add_argument("--diameters", required=True, help="comma-separated diameters (mm)")
    p.set_defaults(func=cmd_interpolate_costs)

    p = sub.add_parser("verify", help="check the bundled datasets against published values")
    p.add_argument("--data", help="alternate dataset directory (default: bundled)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("exhaustive", help="enumerate the whole design space (small instances)")
    common(p, catalog=True)
    p.add_argument("--max-combinations", type=int, default=EnumerationBudget().max_combinations,
                   help="enumeration budget guard")
    p.set_defaults(func=cmd_exhaustive)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation error ({exc.kind}): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
