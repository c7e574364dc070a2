from __future__ import annotations

import logging
from typing import Any, Dict

from core.ga.evaluation import PopulationEvaluator
from core.ga.operators import annealing_rate, apply_pbo
from core.ga.rng import Purpose, substream
from core.ga.schemas import AnnealParams, PBOParams, Population
from core.ga.selection import roulette_select, select_pbo_targets
from core.ga.strategies.base import VariationStrategy

logger = logging.getLogger(__name__)


class PBOStrategy(VariationStrategy):
    """Annealing-rate target selection, PBO, re-evaluation, then roulette survival."""

    name = "pbo"

    def __init__(self) -> None:
        self.pbo = PBOParams()
        self.anneal = AnnealParams()

    def initialize(self, config: Dict[str, Any]) -> None:
        if config.get("pbo") is not None:
            self.pbo = PBOParams.model_validate(config["pbo"])
        if config.get("anneal") is not None:
            self.anneal = AnnealParams.model_validate(config["anneal"])

    @property
    def g_size(self) -> int:
        return self.anneal.g_size

    def variation_rate(self, generation: int) -> float:
        return annealing_rate(generation, self.anneal)

    def advance(self, pop: Population, generation: int, evaluator: PopulationEvaluator) -> Population:
        seed = pop.rng_seed
        rate = self.variation_rate(generation)
        mask = select_pbo_targets(pop, rate, substream(seed, generation, Purpose.SELECT))

        varied = [
            apply_pbo(ind, self.pbo, substream(seed, generation, idx, Purpose.PBO)) if mask[idx] else ind
            for idx, ind in enumerate(pop.individuals)
        ]
        logger.debug(f"gen {generation}: P_ann={rate:.4f}, {int(mask.sum())} PBO targets")

        varied_pop = evaluator.evaluate_and_normalize(pop.replaced(varied))
        return roulette_select(varied_pop, substream(seed, generation, Purpose.ROULETTE))
