"""
Genetic engine: the generation loop shared by the PBO strategy and the
crossover + mutation baseline.
"""
import logging
from typing import Callable, Iterable, List, Optional

from core.genome import Genome
from .diversity import hamming_diversity
from .evaluation import Objective, PopulationEvaluator
from .operators import annealing_rate, apply_pbo, compute_inversion_probability, normalize_fitness
from .rng import Purpose, derive_seed, substream
from .schemas import (
    LOG_COLUMNS,
    AnnealParams,
    BaselineParams,
    EvolutionResult,
    GAConfig,
    GenerationRecord,
    Individual,
    PBOParams,
    Population,
)
from .selection import elite_index, roulette_select, select_pbo_targets
from .strategies import BaselineStrategy, PBOStrategy, StrategyFactory, VariationStrategy

logger = logging.getLogger(__name__)


__all__ = [
    "evolve",
    "run_generation_loop",
    "baseline_ga",
    "initial_population",
    "compute_inversion_probability",
    "normalize_fitness",
    "apply_pbo",
    "annealing_rate",
    "select_pbo_targets",
    "roulette_select",
    "elite_index",
    "hamming_diversity",
    "PBOParams",
    "AnnealParams",
    "BaselineParams",
    "GAConfig",
    "Individual",
    "Population",
    "GenerationRecord",
    "EvolutionResult",
    "LOG_COLUMNS",
    "StrategyFactory",
    "VariationStrategy",
    "PBOStrategy",
    "BaselineStrategy",
    "PopulationEvaluator",
]

GenerationCallback = Callable[[GenerationRecord], None]


def initial_population(
    seed: int,
    size: int,
    n_params: int,
    bits_per_param: int,
    seeded: Iterable[Genome] = (),
) -> Population:
    """
    `size` individuals: the `seeded` genomes first, the rest uniform random bits.
    """
    if size < 1:
        raise ValueError(f"Population size must be positive, got {size}")
    individuals: List[Individual] = [Individual(genome=g) for g in seeded][:size]
    for idx in range(len(individuals), size):
        rng = substream(seed, 0, idx, Purpose.INIT)
        individuals.append(Individual(genome=Genome.random(rng, n_params, bits_per_param)))
    return Population(individuals=individuals, generation=0, rng_seed=seed)


def _record(pop: Population, generation: int, rate: float) -> GenerationRecord:
    objectives = pop.objectives()
    diversity = hamming_diversity(pop) if len(pop) > 1 else 0.0
    return GenerationRecord(
        generation=generation,
        best_sad=float(objectives.min()),
        mean_sad=float(objectives.mean()),
        p_ann=float(rate),
        mean_hamming=diversity,
    )


def evolve(
    initial: Population,
    strategy: VariationStrategy,
    objective: Objective,
    threads: int = 1,
    generations: Optional[int] = None,
    on_generation: Optional[GenerationCallback] = None,
) -> EvolutionResult:
    """
    Drive `strategy` for its generation budget.

    Each generation: evaluate stale members, normalize, log elite / mean /
    diversity, then let the strategy build the next generation.

    Args:
        initial: Starting population (may be stale).
        strategy: Variation scheme.
        objective: Genome -> SAD; must tolerate concurrent calls when threads > 1.
        threads: Worker threads for objective evaluation.
        generations: Overrides strategy.g_size (0 returns `initial` untouched).
        on_generation: Called with every log row.

    Returns:
        Final evaluated population and one log row per generation.
    """
    total = strategy.g_size if generations is None else generations
    if total <= 0:
        return EvolutionResult(population=initial, log=[])

    evaluator = PopulationEvaluator(objective, threads)
    pop = initial
    log: List[GenerationRecord] = []

    # `total` counts varied generations: rows cover i = 0..total-1, so the rate at
    # i = total is never drawn; the final population is evaluated but not logged.
    for i in range(total):
        pop = evaluator.evaluate_and_normalize(pop)
        record = _record(pop, i, strategy.variation_rate(i))
        log.append(record)
        if on_generation:
            on_generation(record)
        pop = strategy.advance(pop, i, evaluator)

    pop = evaluator.evaluate_and_normalize(pop)
    logger.debug(
        f"{strategy.name}: {total} generations, best SAD {log[0].best_sad:.4f} -> "
        f"{float(pop.objectives().min()):.4f}, {evaluator.calls} evaluations"
    )
    return EvolutionResult(population=pop, log=log)


def run_generation_loop(
    initial: Population,
    pbo: PBOParams,
    anneal: AnnealParams,
    objective: Objective,
    threads: int = 1,
    on_generation: Optional[GenerationCallback] = None,
) -> EvolutionResult:
    """PBO + annealing selection + roulette survival for anneal.g_size generations."""
    strategy = StrategyFactory.get_strategy("pbo", {"pbo": pbo, "anneal": anneal})
    return evolve(initial, strategy, objective, threads=threads, on_generation=on_generation)


def baseline_ga(
    initial: Population,
    params: BaselineParams,
    objective: Objective,
    threads: int = 1,
    on_generation: Optional[GenerationCallback] = None,
) -> EvolutionResult:
    """Crossover + mutation comparator with the same loop and log schema."""
    strategy = StrategyFactory.get_strategy("baseline", {"baseline": params})
    return evolve(initial, strategy, objective, threads=threads, on_generation=on_generation)
