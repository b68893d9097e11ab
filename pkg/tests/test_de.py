import numpy as np
import pytest

from conftest import single_stockpile_instance
from oracles import band_copper_optimum, constraints_hold, scalar_outcome, total_copper
from stockblend.baseline import random_search_baseline
from stockblend.de import (
    DEConfig,
    MonthProblem,
    crossover_binomial,
    mutate_target_to_best,
    solve_one_month,
)
from stockblend.fitness import best_index, compare_lex, evaluate, is_feasible
from stockblend.instances import probe_solution
from stockblend.model import Bounds, ContractError, Instance, StockpileState
from stockblend.process import ProcessParams


class TestMutation:
    def test_worked_example(self):
        v = mutate_target_to_best([0.2, 0.4], [0.3, 0.3], [0.1, 0.5], [0.2, 0.2], 1.2)
        np.testing.assert_allclose(v, [0.2, 0.64], rtol=0, atol=1e-15)

    def test_zero_scale(self):
        x = np.array([0.2, 0.4])
        np.testing.assert_array_equal(mutate_target_to_best(x, [1, 1], [3, 3], [0, 2], 0.0), x)

    def test_zero_differentials(self):
        x = np.array([0.2, 0.4])
        np.testing.assert_array_equal(mutate_target_to_best(x, x, [0.5, 0.5], [0.5, 0.5], 1.2), x)

    def test_indices_must_differ(self):
        with pytest.raises(ContractError):
            mutate_target_to_best([0], [0], [0], [0], 1.0, indices=(1, 2, 1))


class TestCrossover:
    def test_full_rate_takes_mutant(self):
        x, v = np.zeros(6), np.ones(6)
        np.testing.assert_array_equal(crossover_binomial(x, v, 1.0, np.random.default_rng(1)), v)

    def test_zero_rate_takes_one_component(self):
        x, v = np.zeros(6), np.ones(6)
        for seed in range(20):
            assert crossover_binomial(x, v, 0.0, np.random.default_rng(seed)).sum() == 1.0

    def test_replay(self):
        x, v = np.arange(10.0), -np.arange(10.0) - 1
        u = crossover_binomial(x, v, 0.5, np.random.default_rng(77))
        replay = np.random.default_rng(77)
        forced = replay.integers(10)
        take = replay.random(10) <= 0.5
        take[forced] = True
        np.testing.assert_array_equal(u, np.where(take, v, x))
        assert 0 < take.sum() < 10


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"pop_size": 3},
            {"scale": 0.0},
            {"crossover": 1.5},
            {"max_evals": 5},
            {"mode": "pareto"},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            DEConfig(**kwargs)

    def test_defaults(self):
        c = DEConfig()
        assert (c.pop_size, c.scale, c.crossover, c.max_evals, c.mode) == (10, 1.2, 0.5, 100_000, "lex")


class TestMonthProblem:
    def test_layout(self, table_instance):
        prob = MonthProblem(table_instance)
        assert (prob.n_fractions, prob.dim) == (13, 15)

    def test_repair_writes_back(self, table_instance):
        prob = MonthProblem(table_instance)
        genome = prob.random_genome(np.random.default_rng(0))
        prob.repair(genome)
        for b in prob.blocks:
            assert genome[b].sum() == pytest.approx(1.0, abs=1e-12)
        before = genome.copy()
        prob.repair(genome)
        np.testing.assert_array_equal(genome, before)

    def test_encode_decode(self, table_instance):
        prob = MonthProblem(table_instance)
        sol = probe_solution(table_instance)
        assert prob.decode(prob.encode(sol)) == sol

    def test_month_range(self, table_instance):
        with pytest.raises(ContractError):
            MonthProblem(table_instance, month=1)


class TestSolve:
    def test_single_stockpile_optimum(self, single_instance):
        res = solve_one_month(single_instance, DEConfig(max_evals=500, seed=3))
        best = res.best
        np.testing.assert_array_equal(best.decoded.fractions[0][0], [1.0])
        k = best.decoded.durations[0][0] * scalar_outcome(1.0, single_instance.initial_state.grades[0],
                                                          single_instance.process)[1]
        assert 319.0 <= k <= 321.0
        assert best.fitness.copper == pytest.approx(total_copper(single_instance, best.decoded), rel=1e-12)
        opt = band_copper_optimum(320.0, single_instance.initial_state.grades[0], single_instance.process, 720.0)
        assert best.fitness.copper <= opt + 1e-9

    def test_init_only_budget(self, table_instance):
        res = solve_one_month(table_instance, DEConfig(max_evals=10, seed=4))
        assert res.evaluations == 10
        assert len(res.history) == 1
        fits = [ind.fitness for ind in res.population]
        assert res.best is res.population[best_index(fits)]

    def test_identical_stockpiles_symmetry(self):
        g = np.zeros((2, 7))
        g[:, 0] = 0.025
        inst = Instance(
            available_duration=np.array([720.0]),
            haul_tonnage=np.zeros((1, 2)),
            haul_grades=np.zeros((1, 2, 7)),
            initial_state=StockpileState(np.array([1e6, 1e6]), g),
            target_concentrate=(np.array([400.0]),),
            access=(((0, 1),),),
            bounds=Bounds(0.0, 1.0, 1.0, 1.0),
            process=ProcessParams(),
        )
        res = solve_one_month(inst, DEConfig(max_evals=300, seed=1))
        single = solve_one_month(
            single_stockpile_instance(cu=0.025, target=400.0), DEConfig(max_evals=300, seed=1)
        )
        assert res.best.fitness.copper == pytest.approx(single.best.fitness.copper, rel=1e-12)

    def test_deterministic(self, table_instance):
        a = solve_one_month(table_instance, DEConfig(max_evals=300, seed=9))
        b = solve_one_month(table_instance, DEConfig(max_evals=300, seed=9))
        assert a.best.fitness == b.best.fitness
        np.testing.assert_array_equal(a.best.genome, b.best.genome)

    def test_budget_respected(self, table_instance):
        res = solve_one_month(table_instance, DEConfig(max_evals=137, seed=2))
        assert res.evaluations == 137

    def test_history_never_worsens(self, table_instance):
        res = solve_one_month(table_instance, DEConfig(max_evals=400, seed=2))
        for prev, cur in zip(res.history, res.history[1:]):
            assert compare_lex(cur, prev) >= 0

    def test_finds_feasible_plan(self, table_instance):
        res = solve_one_month(table_instance, DEConfig(max_evals=2000, seed=1))
        assert is_feasible(res.best.fitness, table_instance)
        assert constraints_hold(table_instance, res.best.decoded)
        fv, _, _ = evaluate(res.best.decoded, table_instance)
        assert fv == res.best.fitness

    def test_warm_start_in_slot_zero(self, table_instance):
        probe = probe_solution(table_instance)
        res = solve_one_month(table_instance, DEConfig(max_evals=10, seed=1), warm_start=probe)
        np.testing.assert_array_equal(res.population[0].decoded.fractions[0][0], probe.fractions[0][0])

    def test_seed_override(self, table_instance):
        a = solve_one_month(table_instance, DEConfig(max_evals=50, seed=1), seed=np.random.SeedSequence(5))
        b = solve_one_month(table_instance, DEConfig(max_evals=50, seed=1))
        assert a.best.fitness != b.best.fitness


class TestBaseline:
    def test_single_sample(self, table_instance):
        res = random_search_baseline(table_instance, 1, seed=3)
        assert res.evaluations == 1
        fv, _, _ = evaluate(res.solution, table_instance)
        assert fv == res.fitness

    def test_deterministic(self, table_instance):
        a = random_search_baseline(table_instance, 50, seed=3)
        b = random_search_baseline(table_instance, 50, seed=3)
        assert a.fitness == b.fitness and a.solution == b.solution

    def test_single_stockpile_near_optimum(self, single_instance):
        res = random_search_baseline(single_instance, 1000, seed=1)
        opt = band_copper_optimum(320.0, single_instance.initial_state.grades[0], single_instance.process, 720.0)
        assert res.fitness.copper == pytest.approx(opt, rel=0.05)

    def test_rejects_empty_budget(self, table_instance):
        with pytest.raises(ValueError):
            random_search_baseline(table_instance, 0)
