from __future__ import annotations

from typing import Any, Dict, List, Tuple

import numpy as np

from core.ga.evaluation import PopulationEvaluator
from core.ga.rng import Purpose, substream
from core.ga.schemas import BaselineParams, Individual, Population
from core.ga.selection import elite_index, roulette_weights
from core.ga.strategies.base import VariationStrategy
from core.genome import Genome


class BaselineStrategy(VariationStrategy):
    """Roulette parents, one-point crossover, per-bit mutation, single elite."""

    name = "baseline"

    def __init__(self) -> None:
        self.params = BaselineParams()

    def initialize(self, config: Dict[str, Any]) -> None:
        if config.get("baseline") is not None:
            self.params = BaselineParams.model_validate(config["baseline"])

    @property
    def g_size(self) -> int:
        return self.params.g_size

    def variation_rate(self, generation: int) -> float:
        return self.params.crossover_rate

    def mutation_rate(self, genome_length: int) -> float:
        if self.params.mutation_rate is not None:
            return self.params.mutation_rate
        return 1.0 / genome_length if genome_length else 0.0

    def _crossover(self, a: Genome, b: Genome, rng: np.random.Generator) -> Tuple[Genome, Genome]:
        length = len(a)
        if length < 2 or rng.random() >= self.params.crossover_rate:
            return a, b
        point = int(rng.integers(1, length))
        bits_a = np.concatenate([a.bits[:point], b.bits[point:]])
        bits_b = np.concatenate([b.bits[:point], a.bits[point:]])
        return Genome(bits_a, a.bits_per_param), Genome(bits_b, b.bits_per_param)

    @staticmethod
    def _child(parent: Individual, genome: Genome) -> Individual:
        # Unchanged genomes keep their cached objective
        return parent if genome == parent.genome else Individual(genome=genome)

    def advance(self, pop: Population, generation: int, evaluator: PopulationEvaluator) -> Population:
        n = len(pop)
        seed = pop.rng_seed
        children: List[Individual] = [pop[elite_index(pop)]]
        if n == 1:
            return pop.replaced(children, generation=pop.generation + 1)

        weights = roulette_weights(pop)
        rate = self.mutation_rate(pop.genome_length)
        pair = 0
        while len(children) < n:
            pick_rng = substream(seed, generation, pair, Purpose.CROSSOVER)
            i, j = (int(k) for k in pick_rng.choice(n, size=2, replace=True, p=weights))
            ga, gb = self._crossover(pop[i].genome, pop[j].genome, pick_rng)

            mut_rng = substream(seed, generation, pair, Purpose.MUTATION)
            ga = ga.flipped(mut_rng.random(len(ga)) < rate)
            gb = gb.flipped(mut_rng.random(len(gb)) < rate)

            children.append(self._child(pop[i], ga))
            if len(children) < n:
                children.append(self._child(pop[j], gb))
            pair += 1
        return pop.replaced(children, generation=pop.generation + 1)
