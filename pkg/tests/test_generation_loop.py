from __future__ import annotations

import unittest

import numpy as np

from core.bench import TranslationProblem
from core.errors import ObjectiveError
from core.ga import (
    LOG_COLUMNS,
    AnnealParams,
    PBOParams,
    PopulationEvaluator,
    StrategyFactory,
    annealing_rate,
    evolve,
    initial_population,
    run_generation_loop,
)
from core.genome import Genome
from tests.fixtures import RegistrationFixtures, constant_objective, ones_count_objective


def run_toy(problem: TranslationProblem, seed: int, size: int = 20, generations: int = 50):
    pop = initial_population(seed, size, 1, problem.encoding.bits_per_param)
    return run_generation_loop(pop, PBOParams(), AnnealParams(g_size=generations), problem)


class TestInitialPopulation(unittest.TestCase):
    """Test initial_population."""

    def test_size_and_length(self):
        """Requested size, n_params * B bits each."""
        pop = initial_population(3, 12, 4, 5)
        self.assertEqual(len(pop), 12)
        self.assertEqual(pop.genome_length, 20)
        self.assertTrue(all(ind.is_stale for ind in pop.individuals))

    def test_seeded_genomes_first(self):
        """Seeded genomes occupy the first slots."""
        seeded = Genome.zeros(4, 5)
        pop = initial_population(3, 5, 4, 5, seeded=[seeded])
        self.assertEqual(pop[0].genome, seeded)

    def test_deterministic(self):
        """Same seed gives the same genomes."""
        a = initial_population(11, 6, 2, 5)
        b = initial_population(11, 6, 2, 5)
        self.assertEqual([i.genome for i in a.individuals], [i.genome for i in b.individuals])

    def test_rejects_empty(self):
        """Population size must be positive."""
        with self.assertRaises(ValueError):
            initial_population(0, 0, 1, 5)


class TestGenerationLoop(unittest.TestCase):
    """Test the PBO generation loop."""

    def test_zero_generations(self):
        """A zero-generation budget returns the initial population and an empty log."""
        pop = RegistrationFixtures.toy_population(1)
        strategy = StrategyFactory.get_strategy("pbo", {})
        result = evolve(pop, strategy, ones_count_objective, generations=0)
        self.assertEqual(result.log, [])
        self.assertIs(result.population, pop)

    def test_constant_objective_keeps_elite(self):
        """With every objective equal the elite genome is never changed."""
        pop = RegistrationFixtures.toy_population(2, size=8, bits=6)
        result = run_generation_loop(pop, PBOParams(), AnnealParams(g_size=10), constant_objective)
        self.assertEqual(result.population[0].genome, pop[0].genome)
        self.assertEqual({r.best_sad for r in result.log}, {1.0})

    def test_best_is_non_increasing(self):
        """The logged best objective never gets worse."""
        pop = initial_population(5, 16, 4, 5)
        result = run_generation_loop(pop, PBOParams(), AnnealParams(g_size=40), ones_count_objective)
        best = [r.best_sad for r in result.log]
        self.assertTrue(all(b <= a for a, b in zip(best, best[1:])))
        self.assertLessEqual(float(result.population.objectives().min()), best[-1])

    def test_shape_invariants(self):
        """Population size and genome length are constant across generations."""
        pop = initial_population(6, 10, 3, 5)
        sizes = []
        result = run_generation_loop(
            pop, PBOParams(), AnnealParams(g_size=15), ones_count_objective,
            on_generation=lambda r: sizes.append(r.generation),
        )
        self.assertEqual(sizes, list(range(15)))
        self.assertEqual(len(result.population), 10)
        self.assertEqual(result.population.genome_length, 15)

    def test_log_rows(self):
        """One row per generation with the annealing rate and bounded diversity."""
        pop = initial_population(7, 10, 2, 5)
        anneal = AnnealParams(g_size=12, p_min=0.2)
        result = run_generation_loop(pop, PBOParams(), anneal, ones_count_objective)
        self.assertEqual(len(result.log), 12)
        self.assertEqual(result.log[0].p_ann, 1.0)
        for row in result.log:
            self.assertLessEqual(row.best_sad, row.mean_sad)
            self.assertTrue(0.0 <= row.mean_hamming <= 1.0)
        self.assertEqual(LOG_COLUMNS, ("generation", "best_sad", "mean_sad", "p_ann", "mean_hamming"))

    def test_g_size_counts_varied_generations(self):
        """Rows cover i = 0..G-1; the final population is evaluated but not logged."""
        pop = initial_population(3, 8, 2, 5)
        anneal = AnnealParams(g_size=6, p_min=0.2)
        result = run_generation_loop(pop, PBOParams(), anneal, ones_count_objective)
        self.assertEqual([row.generation for row in result.log], list(range(6)))
        self.assertAlmostEqual(result.log[-1].p_ann, annealing_rate(5, anneal), places=12)
        self.assertGreater(result.log[-1].p_ann, anneal.p_min)
        self.assertFalse(any(ind.is_stale for ind in result.population.individuals))
        self.assertLessEqual(result.elite.raw_objective, result.log[-1].best_sad)

    def test_deterministic(self):
        """Same seed and inputs give identical logs and final genomes."""
        def go():
            pop = initial_population(21, 12, 4, 5)
            return run_generation_loop(pop, PBOParams(), AnnealParams(g_size=20), ones_count_objective)

        a, b = go(), go()
        self.assertEqual(a.log, b.log)
        self.assertEqual(
            [i.genome for i in a.population.individuals],
            [i.genome for i in b.population.individuals],
        )

    def test_thread_count_does_not_change_result(self):
        """Parallel evaluation gives the same run as serial evaluation."""
        problem = TranslationProblem(bits=6)
        pop = initial_population(4, 12, 1, 6)
        serial = run_generation_loop(pop, PBOParams(), AnnealParams(g_size=10), problem, threads=1)
        parallel = run_generation_loop(pop, PBOParams(), AnnealParams(g_size=10), problem, threads=4)
        self.assertEqual(serial.log, parallel.log)

    def test_four_bit_toy_reaches_oracle(self):
        """4-bit translation toy: oracle optimum in at least 9 of 10 seeds."""
        problem = TranslationProblem(bits=4)
        oracle = problem.oracle()
        hits = sum(run_toy(problem, seed).elite.genome == oracle.genome for seed in range(10))
        self.assertGreaterEqual(hits, 9)


class TestPopulationEvaluator(unittest.TestCase):
    """Test PopulationEvaluator."""

    def test_non_finite_objective(self):
        """NaN objectives raise ObjectiveError."""
        evaluator = PopulationEvaluator(lambda g: float("nan"))
        with self.assertRaises(ObjectiveError):
            evaluator.evaluate(initial_population(0, 3, 1, 4))

    def test_only_stale_members_are_scored(self):
        """Cached objectives are reused."""
        evaluator = PopulationEvaluator(ones_count_objective)
        pop = evaluator.evaluate(initial_population(0, 5, 2, 4))
        self.assertEqual(evaluator.calls, 5)
        evaluator.evaluate(pop)
        self.assertEqual(evaluator.calls, 5)

    def test_normalizes(self):
        """evaluate_and_normalize fills norm_fitness in [0, 1] with the best at 1."""
        pop = PopulationEvaluator(ones_count_objective).evaluate_and_normalize(initial_population(1, 8, 2, 4))
        fits = np.array([ind.norm_fitness for ind in pop.individuals])
        self.assertTrue(np.all((fits >= 0.0) & (fits <= 1.0)))
        self.assertEqual(fits[int(np.argmin(pop.objectives()))], 1.0)


if __name__ == "__main__":
    unittest.main()
