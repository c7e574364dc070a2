from __future__ import annotations

import numpy as np

from core.ga.schemas import Population

ROULETTE_EPSILON = 1e-6


def elite_index(pop: Population) -> int:
    """Index of the lowest objective; ties go to the lowest index."""
    return int(np.argmin(pop.objectives()))


def normalized_fitness(pop: Population) -> np.ndarray:
    fits = [ind.norm_fitness for ind in pop.individuals]
    if any(f is None for f in fits):
        raise ValueError("Population fitness has not been normalized")
    return np.asarray(fits, dtype=np.float64)


def roulette_weights(pop: Population) -> np.ndarray:
    """Selection probabilities proportional to norm_fitness + epsilon."""
    weights = normalized_fitness(pop) + ROULETTE_EPSILON
    return weights / weights.sum()


def select_pbo_targets(pop: Population, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Boolean mask marking each non-elite individual independently with probability `rate`."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"Selection rate must lie in [0, 1], got {rate}")
    n = len(pop)
    if n == 0:
        return np.zeros(0, dtype=bool)
    mask = rng.random(n) < rate
    mask[elite_index(pop)] = False
    return mask


def roulette_select(pop: Population, rng: np.random.Generator) -> Population:
    """
    Next generation of the same size: slot 0 is the elite, the rest are
    drawn with replacement in proportion to norm_fitness + epsilon.
    """
    n = len(pop)
    elite = pop[elite_index(pop)]
    picks = rng.choice(n, size=n - 1, replace=True, p=roulette_weights(pop)) if n > 1 else []
    chosen = [elite] + [pop[int(k)] for k in picks]
    return pop.replaced(chosen, generation=pop.generation + 1)
