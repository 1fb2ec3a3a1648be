"""Honey-bee mating optimization over discrete diameter genomes.

A genome assigns one catalog index per pipe. Each generation the queen (the
incumbent best) performs a mating flight over a drone pool, accepting drones
into her spermatheca with probability exp(-|fitness gap| / speed) while the
speed decays; broods are then bred gene-wise from queen and sperm, perturbed
by worker-style mutation, and the best brood replaces the queen when it ranks
better. Candidates are ranked feasibility-first (see ``feasibility``), so the
search first drives constraint violation down and then minimizes cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .costs import PipeCatalog, network_cost
from .feasibility import DesignLimits, FeasibilityReport, evaluate_constraints
from .hydraulics import HydraulicParams, simulate
from .network import TreeNetwork
from .scoring import Evaluator, ScoredGenome

__all__ = [
    "HbmoParams",
    "GenerationRecord",
    "RunHistory",
    "OptimizeResult",
    "random_genome",
    "mating_flight",
    "breed",
    "mutate",
    "optimize",
]


@dataclass(frozen=True)
class HbmoParams:
    """Search hyperparameters.

    ``speed_initial_range`` of None resolves at run time to
    (0.5, 1.0) times the initial population's cost spread, keeping the
    acceptance probabilities scale-free. ``mutation_rate`` of None resolves
    to 2 / pipe_count (two expected gene flips per brood).
    """

    drone_count: int = 50
    spermatheca_capacity: int = 50
    brood_count: int = 50
    mating_flights: int = 500
    speed_initial_range: tuple[float, float] | None = None
    speed_decay: float = 0.98
    speed_min: float = 0.01
    crossover_queen_bias: float = 0.5
    mutation_rate: float | None = None
    max_evaluations: int = 200_000
    seed: int = 0

    def __post_init__(self):
        for name in ("drone_count", "spermatheca_capacity", "brood_count",
                     "mating_flights", "max_evaluations"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.spermatheca_capacity > self.drone_count:
            raise ValueError("spermatheca_capacity must not exceed drone_count")
        if not 0 < self.speed_decay < 1:
            raise ValueError("speed_decay must be in (0, 1)")
        if self.speed_min <= 0:
            raise ValueError("speed_min must be > 0")
        if not 0 <= self.crossover_queen_bias <= 1:
            raise ValueError("crossover_queen_bias must be a probability")
        if self.mutation_rate is not None and not 0 <= self.mutation_rate <= 1:
            raise ValueError("mutation_rate must be a probability")
        if self.speed_initial_range is not None:
            lo, hi = self.speed_initial_range
            if not 0 < lo <= hi:
                raise ValueError("speed_initial_range must be 0 < low <= high")


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_cost: float
    best_feasible: bool
    best_genome: tuple[int, ...]


@dataclass(frozen=True)
class RunHistory:
    """Per-generation incumbents plus run accounting."""

    generations: tuple[GenerationRecord, ...]
    total_evaluations: int
    terminated: str  # "generations" | "evaluations"


@dataclass(frozen=True)
class OptimizeResult:
    genome: np.ndarray
    cost: float
    report: FeasibilityReport
    history: RunHistory


def random_genome(pipe_count: int, catalog_size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random catalog index for every pipe."""
    if catalog_size < 1:
        raise ValueError("catalog must not be empty")
    return rng.integers(0, catalog_size, size=pipe_count)


def _scalar_fitness(s: ScoredGenome, reference_cost: float) -> float:
    # Feasible candidates compare by cost; infeasible ones sit above the worst
    # feasible cost scaled by their violation, keeping the two classes on one axis.
    if s.feasible:
        return s.cost
    return (1.0 + s.violation) * reference_cost


def mating_flight(queen: ScoredGenome, drones: list[ScoredGenome], params: HbmoParams,
                  rng: np.random.Generator, reference_cost: float | None = None) -> list[np.ndarray]:
    """Collect a spermatheca by probabilistic drone acceptance under decaying speed.

    Drones are visited in order (cycling); each trial accepts with probability
    exp(-|queen fitness - drone fitness| / speed), after which the speed decays.
    Stops when the spermatheca is full or the speed drops below the minimum.
    """
    if not drones:
        raise ValueError("drones must be nonempty")
    if params.speed_initial_range is None:
        raise ValueError("speed_initial_range must be resolved before a mating flight")
    if reference_cost is None:
        reference_cost = max(abs(queen.cost), 1.0)

    lo, hi = params.speed_initial_range
    speed = rng.uniform(lo, hi)
    queen_fitness = _scalar_fitness(queen, reference_cost)
    spermatheca: list[np.ndarray] = []
    trial = 0
    while len(spermatheca) < params.spermatheca_capacity and speed >= params.speed_min:
        drone = drones[trial % len(drones)]
        gap = abs(queen_fitness - _scalar_fitness(drone, reference_cost))
        if rng.random() < math.exp(-gap / speed):
            spermatheca.append(np.array(drone.genome, dtype=np.intp))
        speed *= params.speed_decay
        trial += 1
    return spermatheca


def breed(queen: np.ndarray, sperm: np.ndarray, bias: float,
          rng: np.random.Generator) -> np.ndarray:
    """Gene-wise crossover: take the queen's gene with probability ``bias``."""
    queen = np.asarray(queen, dtype=np.intp)
    sperm = np.asarray(sperm, dtype=np.intp)
    if queen.shape != sperm.shape:
        raise ValueError("queen and sperm genomes differ in length")
    take_queen = rng.random(queen.shape[0]) < bias
    return np.where(take_queen, queen, sperm)


def mutate(genome: np.ndarray, rate: float, catalog_size: int,
           rng: np.random.Generator) -> np.ndarray:
    """Worker-style perturbation, independently per gene with probability ``rate``.

    A mutated gene takes a clamped one-step neighbor (half the time) or a
    uniform random catalog index otherwise.
    """
    if catalog_size < 1:
        raise ValueError("catalog must not be empty")
    genome = np.asarray(genome, dtype=np.intp)
    n = genome.shape[0]
    hit = rng.random(n) < rate
    neighbor = rng.random(n) < 0.5
    step = rng.integers(0, 2, size=n) * 2 - 1
    uniform = rng.integers(0, catalog_size, size=n)
    stepped = np.clip(genome + step, 0, catalog_size - 1)
    return np.where(hit, np.where(neighbor, stepped, uniform), genome)


def optimize(network: TreeNetwork, catalog: PipeCatalog, limits: DesignLimits,
             hydraulic_params: HydraulicParams, params: HbmoParams) -> OptimizeResult:
    """Run the full search and return the re-verified best solution.

    The returned cost and feasibility report come from a fresh single-candidate
    evaluation of the final genome, never from cached batch scores.
    """
    if len(catalog) < 1:
        raise ValueError("catalog must not be empty")
    rng = np.random.default_rng(params.seed)
    evaluator = Evaluator(network, catalog, limits, hydraulic_params)
    n_pipes = network.pipe_count
    n_cat = len(catalog)

    mutation_rate = params.mutation_rate if params.mutation_rate is not None else 2.0 / n_pipes

    if n_cat == 1:
        # Singleton alphabet: the search space is one genome.
        genome = np.zeros(n_pipes, dtype=np.intp)
        final = _fresh_report(network, catalog, limits, hydraulic_params, genome)
        record = GenerationRecord(0, final[1], final[2].feasible, tuple(int(g) for g in genome))
        return OptimizeResult(genome, final[1], final[2],
                              RunHistory((record,), 1, "generations"))

    population = np.stack([random_genome(n_pipes, n_cat, rng)
                           for _ in range(params.drone_count)])
    drones = evaluator.score_batch(population)
    evaluations = len(drones)
    queen = min(drones, key=lambda s: s.key)

    costs = [s.cost for s in drones]
    spread = max(costs) - min(costs)
    if params.speed_initial_range is None:
        spread = spread if spread > 0 else 1.0
        effective = replace(params, speed_initial_range=(0.5 * spread, 1.0 * spread))
    else:
        effective = params

    worst_feasible = max((s.cost for s in drones if s.feasible), default=None)
    reference_cost = worst_feasible if worst_feasible is not None else max(costs)

    records: list[GenerationRecord] = []
    terminated = "generations"
    n_random = params.drone_count // 2

    for generation in range(1, params.mating_flights + 1):
        if evaluations >= params.max_evaluations:
            terminated = "evaluations"
            break
        if generation > 1:
            refreshed = [random_genome(n_pipes, n_cat, rng) for _ in range(n_random)]
            refreshed += [mutate(queen.genome, mutation_rate, n_cat, rng)
                          for _ in range(params.drone_count - n_random)]
            drones = evaluator.score_batch(np.stack(refreshed))
            evaluations += len(drones)
            reference_cost = _bump_reference(drones, reference_cost)
            if evaluations >= params.max_evaluations:
                terminated = "evaluations"
                break

        spermatheca = mating_flight(queen, drones, effective, rng, reference_cost)
        broods = np.empty((params.brood_count, n_pipes), dtype=np.intp)
        for b in range(params.brood_count):
            if spermatheca:
                sperm = spermatheca[int(rng.integers(0, len(spermatheca)))]
            else:
                sperm = queen.genome
            child = breed(queen.genome, sperm, params.crossover_queen_bias, rng)
            broods[b] = mutate(child, mutation_rate, n_cat, rng)

        scored = evaluator.score_batch(broods)
        evaluations += len(scored)
        reference_cost = _bump_reference(scored, reference_cost)

        challenger = min(scored, key=lambda s: s.key)
        if challenger.key < queen.key:
            queen = challenger
        records.append(GenerationRecord(
            generation, queen.cost, queen.feasible, tuple(int(g) for g in queen.genome)
        ))

    genome, cost, report = _fresh_report(network, catalog, limits, hydraulic_params,
                                         queen.genome)
    history = RunHistory(tuple(records), evaluations, terminated)
    return OptimizeResult(genome, cost, report, history)


def _bump_reference(scored: list[ScoredGenome], current: float) -> float:
    feas = [s.cost for s in scored if s.feasible]
    return max([current] + feas) if feas else current


def _fresh_report(network, catalog, limits, hydraulic_params, genome):
    genome = np.asarray(genome, dtype=np.intp)
    diameters = catalog.diameters[genome]
    state = simulate(network, diameters, hydraulic_params)
    report = evaluate_constraints(state, limits)
    cost = network_cost(diameters, network.lengths, catalog).total
    return genome, cost, report
