from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List

from core.errors import ObjectiveError
from core.ga.operators import normalize_fitness
from core.ga.schemas import Individual, Population
from core.genome import Genome

logger = logging.getLogger(__name__)

Objective = Callable[[Genome], float]


class PopulationEvaluator:
    """
    Fills in stale objectives, optionally on a thread pool.

    Results are written back by index, so the worker count never changes
    the outcome. The objective must be safe to call concurrently.
    """

    def __init__(self, objective: Objective, threads: int = 1):
        self.objective = objective
        self.threads = max(1, int(threads))
        self.calls = 0

    def _score(self, genome: Genome) -> float:
        return float(self.objective(genome))

    def evaluate(self, pop: Population) -> Population:
        stale = [i for i, ind in enumerate(pop.individuals) if ind.is_stale]
        if not stale:
            return pop

        genomes = [pop[i].genome for i in stale]
        if self.threads > 1 and len(genomes) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                scores = list(executor.map(self._score, genomes))
        else:
            scores = [self._score(g) for g in genomes]
        self.calls += len(scores)

        individuals: List[Individual] = list(pop.individuals)
        for idx, score in zip(stale, scores):
            if not math.isfinite(score):
                raise ObjectiveError(f"Objective returned {score} for individual {idx}")
            individuals[idx] = individuals[idx].with_objective(score)
        return pop.replaced(individuals)

    def evaluate_and_normalize(self, pop: Population) -> Population:
        pop = self.evaluate(pop)
        fits = normalize_fitness(pop.objectives())
        return pop.replaced([ind.with_fitness(f) for ind, f in zip(pop.individuals, fits)])
