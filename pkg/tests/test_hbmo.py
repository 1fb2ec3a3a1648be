import numpy as np
import pytest
from scipy import stats

from branchflow import (
    HbmoParams,
    breed,
    evaluate_constraints,
    mating_flight,
    mutate,
    network_cost,
    optimize,
    random_genome,
    simulate,
)
from branchflow.scoring import Evaluator, ScoredGenome


def scored(genome, cost, feasible=True, violation=0.0):
    return ScoredGenome(np.asarray(genome, dtype=np.intp), cost, feasible, violation)


class TestRandomGenome:
    def test_singleton_catalog_forces_zero(self):
        rng = np.random.default_rng(0)
        np.testing.assert_array_equal(random_genome(6, 1, rng), np.zeros(6))

    def test_reproducible(self):
        a = random_genome(6, 6, np.random.default_rng(42))
        b = random_genome(6, 6, np.random.default_rng(42))
        np.testing.assert_array_equal(a, b)

    def test_marginal_is_uniform(self):
        rng = np.random.default_rng(1)
        draws = np.concatenate([random_genome(1, 6, rng) for _ in range(10_000)])
        counts = np.bincount(draws, minlength=6)
        p = stats.chisquare(counts).pvalue
        assert p > 0.001

    def test_empty_catalog(self):
        with pytest.raises(ValueError):
            random_genome(6, 0, np.random.default_rng(0))


class TestBreed:
    def test_bias_one_clones_queen(self):
        rng = np.random.default_rng(0)
        q, s = np.array([1, 2, 3]), np.array([4, 5, 0])
        np.testing.assert_array_equal(breed(q, s, 1.0, rng), q)

    def test_bias_zero_clones_sperm(self):
        rng = np.random.default_rng(0)
        q, s = np.array([1, 2, 3]), np.array([4, 5, 0])
        np.testing.assert_array_equal(breed(q, s, 0.0, rng), s)

    def test_even_bias_mixes_genes(self):
        rng = np.random.default_rng(3)
        q, s = np.zeros(3, dtype=int), np.full(3, 5)
        children = np.stack([breed(q, s, 0.5, rng) for _ in range(10_000)])
        assert set(np.unique(children)) <= {0, 5}
        # each gene is Bernoulli(0.5) over {0, 5}: mean 2.5, se ~ 0.0144
        assert children.mean() == pytest.approx(2.5, abs=0.1)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="differ in length"):
            breed(np.zeros(3), np.zeros(4), 0.5, np.random.default_rng(0))


class TestMutate:
    def test_rate_zero_is_identity(self):
        rng = np.random.default_rng(0)
        g = np.array([0, 3, 5])
        np.testing.assert_array_equal(mutate(g, 0.0, 6, rng), g)

    def test_singleton_catalog_is_identity(self):
        rng = np.random.default_rng(0)
        g = np.zeros(8, dtype=int)
        np.testing.assert_array_equal(mutate(g, 1.0, 1, rng), g)

    def test_results_stay_in_alphabet(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            out = mutate(np.array([0, 5, 2]), 1.0, 6, rng)
            assert out.min() >= 0 and out.max() <= 5

    def test_neighbor_step_clamps_at_bounds(self):
        rng = np.random.default_rng(9)
        outs = np.array([mutate(np.array([0]), 1.0, 6, rng)[0] for _ in range(10_000)])
        # neighbor branch (prob 1/2) from gene 0 gives {0, 1}; uniform branch
        # adds 1/6 mass on each index, so index 1 lands with prob 1/4 + 1/12
        freq_one = (outs == 1).mean()
        assert freq_one == pytest.approx(1 / 4 + 1 / 12, abs=0.03)
        assert set(np.unique(outs)) <= set(range(6))

    def test_expected_flip_count(self):
        rng = np.random.default_rng(11)
        g = np.full(24, 3)
        flips = [(mutate(g, 2 / 24, 6, rng) != g).sum() for _ in range(5_000)]
        # flips that land on the original value deflate the count slightly
        assert np.mean(flips) == pytest.approx(2.0, abs=0.25)


class TestMatingFlight:
    def params(self, **kw):
        base = dict(speed_initial_range=(1e12, 2e12), spermatheca_capacity=3,
                    drone_count=5)
        base.update(kw)
        return HbmoParams(**base)

    def test_huge_speed_fills_in_order(self):
        queen = scored([0, 0], 10.0)
        drones = [scored([i, i], 10.0 + i) for i in range(5)]
        out = mating_flight(queen, drones, self.params(), np.random.default_rng(0), 100.0)
        assert len(out) == 3
        for i, g in enumerate(out):
            np.testing.assert_array_equal(g, drones[i].genome)

    def test_speed_below_minimum_at_entry(self):
        queen = scored([0], 10.0)
        drones = [scored([1], 11.0)]
        params = self.params(speed_initial_range=(1e-6, 2e-6), speed_min=0.01)
        out = mating_flight(queen, drones, params, np.random.default_rng(0), 100.0)
        assert out == []

    def test_identical_fitness_always_accepts(self):
        queen = scored([0], 42.0)
        drones = [scored([3], 42.0)]
        params = self.params(speed_initial_range=(0.02, 0.03), spermatheca_capacity=2,
                             drone_count=2, speed_decay=0.5, speed_min=0.01)
        # speed dies after ~1-2 trials, yet exp(0) = 1 accepts on the first
        out = mating_flight(queen, drones, params, np.random.default_rng(0), 100.0)
        assert len(out) >= 1
        np.testing.assert_array_equal(out[0], [3])

    def test_infeasible_drones_use_violation_scaled_fitness(self):
        # queen fitness 10; infeasible drone scales to (1 + 1.0) * ref = 20,
        # so with speed 5 the single-trial acceptance rate is exp(-10/5)
        queen = scored([0], 10.0)
        drone = scored([1], 3.0, feasible=False, violation=1.0)
        params = self.params(spermatheca_capacity=1, drone_count=1,
                             speed_initial_range=(5.0, 5.0 + 1e-12),
                             speed_decay=1e-9, speed_min=1e-6)
        rng = np.random.default_rng(1)
        accepted = sum(
            bool(mating_flight(queen, [drone], params, rng, 10.0))
            for _ in range(3000)
        )
        assert accepted / 3000 == pytest.approx(np.exp(-2.0), abs=0.02)

    def test_requires_resolved_speed_range(self):
        queen = scored([0], 1.0)
        with pytest.raises(ValueError, match="speed_initial_range"):
            mating_flight(queen, [queen], HbmoParams(), np.random.default_rng(0), 1.0)

    def test_requires_drones(self):
        queen = scored([0], 1.0)
        with pytest.raises(ValueError, match="drones"):
            mating_flight(queen, [], self.params(), np.random.default_rng(0), 1.0)


class TestParams:
    def test_spermatheca_bounded_by_drones(self):
        with pytest.raises(ValueError, match="spermatheca"):
            HbmoParams(drone_count=5, spermatheca_capacity=6)

    @pytest.mark.parametrize("kw", [
        dict(speed_decay=1.0),
        dict(speed_min=0.0),
        dict(crossover_queen_bias=1.5),
        dict(mutation_rate=-0.1),
        dict(drone_count=0),
        dict(speed_initial_range=(0.0, 1.0)),
        dict(speed_initial_range=(2.0, 1.0)),
    ])
    def test_rejects_bad_values(self, kw):
        with pytest.raises(ValueError):
            HbmoParams(**kw)


def small_params(seed=1, **kw):
    base = dict(drone_count=20, spermatheca_capacity=10, brood_count=20,
                mating_flights=60, max_evaluations=10_000, seed=seed)
    base.update(kw)
    return HbmoParams(**base)


class TestOptimize:
    def test_deterministic_history(self, dummy6, catalog, limits, dummy6_params):
        a = optimize(dummy6, catalog, limits, dummy6_params, small_params())
        b = optimize(dummy6, catalog, limits, dummy6_params, small_params())
        assert a.history == b.history
        np.testing.assert_array_equal(a.genome, b.genome)
        assert a.cost == b.cost

    def test_seed_changes_trajectory(self, dummy6, catalog, limits, dummy6_params):
        a = optimize(dummy6, catalog, limits, dummy6_params, small_params(seed=1))
        b = optimize(dummy6, catalog, limits, dummy6_params, small_params(seed=2))
        assert a.history != b.history

    def test_elitism_monotone(self, dummy6, catalog, limits, dummy6_params):
        res = optimize(dummy6, catalog, limits, dummy6_params, small_params())
        feas_seen = False
        last_cost = None
        for rec in res.history.generations:
            if feas_seen:
                assert rec.best_feasible
                assert rec.best_cost <= last_cost + 1e-12
            if rec.best_feasible:
                feas_seen = True
            last_cost = rec.best_cost

    def test_singleton_catalog_immediate(self, dummy6, limits, dummy6_params):
        from branchflow import PipeCatalog
        solo = PipeCatalog.from_pairs([(198.0, 22.5046)])
        res = optimize(dummy6, solo, limits, dummy6_params, small_params())
        np.testing.assert_array_equal(res.genome, np.zeros(6))
        assert res.history.total_evaluations == 1

    def test_evaluation_accounting(self, dummy6, catalog, limits, dummy6_params):
        params = small_params(max_evaluations=150)
        res = optimize(dummy6, catalog, limits, dummy6_params, params)
        assert res.history.terminated == "evaluations"
        assert res.history.total_evaluations <= 150 + max(params.drone_count,
                                                          params.brood_count)

    def test_generation_budget(self, dummy6, catalog, limits, dummy6_params):
        res = optimize(dummy6, catalog, limits, dummy6_params, small_params(mating_flights=5))
        assert res.history.terminated == "generations"
        assert len(res.history.generations) == 5

    def test_returned_best_is_fresh(self, dummy6, catalog, limits, dummy6_params):
        res = optimize(dummy6, catalog, limits, dummy6_params, small_params())
        diameters = catalog.diameters[res.genome]
        state = simulate(dummy6, diameters, dummy6_params)
        report = evaluate_constraints(state, limits)
        cost = network_cost(diameters, dummy6.lengths, catalog).total
        assert res.cost == cost
        assert res.report.feasible == report.feasible
        assert res.report.violation == report.violation

    def test_finds_demo_optimum(self, dummy6, catalog, limits, dummy6_params):
        res = optimize(dummy6, catalog, limits, dummy6_params, small_params(seed=3))
        np.testing.assert_array_equal(res.genome, [4, 3, 2, 2, 1, 1])
        assert res.cost == pytest.approx(17397.63, abs=1e-6)

    def test_empty_catalog_rejected(self, dummy6, limits, dummy6_params):
        from branchflow import PipeCatalog
        with pytest.raises(ValueError):
            empty = PipeCatalog(np.array([]), np.array([]))
            optimize(dummy6, empty, limits, dummy6_params, small_params())


class TestBatchEvaluator:
    def test_matches_single_candidate_pipeline(self, warapitiya, catalog, limits,
                                               warapitiya_params):
        ev = Evaluator(warapitiya, catalog, limits, warapitiya_params)
        rng = np.random.default_rng(17)
        genomes = rng.integers(0, len(catalog), size=(64, warapitiya.pipe_count))
        batch = ev.evaluate(genomes)
        for i in range(genomes.shape[0]):
            one = ev.score_one(genomes[i])
            assert batch.costs[i] == pytest.approx(one.cost, rel=1e-12)
            assert bool(batch.feasible[i]) == one.feasible
            assert batch.violations[i] == pytest.approx(one.violation, rel=1e-9, abs=1e-12)
