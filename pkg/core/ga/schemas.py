from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.genome import EncodingSpec, Genome

# --- Parameter Models ---


class PBOParams(BaseModel):
    """Inversion probability constants: the peak and the two Gaussian widths."""
    model_config = ConfigDict(frozen=True)

    w_max: float = Field(default=0.5, ge=0.0, le=1.0)
    s_bit: float = Field(default=2.0, gt=0.0)
    s_fit: float = Field(default=0.3, gt=0.0)


class AnnealParams(BaseModel):
    """Annealing schedule: smoothness e, final rate P_min and the generation count."""
    model_config = ConfigDict(frozen=True)

    e: float = Field(default=1.0, gt=0.0)
    p_min: float = Field(default=0.1, ge=0.0, lt=1.0)
    g_size: int = Field(default=200, ge=1)


class BaselineParams(BaseModel):
    """Conventional crossover + mutation GA used as the comparator."""
    model_config = ConfigDict(frozen=True)

    crossover_rate: float = Field(default=0.9, ge=0.0, le=1.0)
    # None means 1 / genome_length
    mutation_rate: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    g_size: int = Field(default=200, ge=0)


class GAConfig(BaseModel):
    """Every GA hyperparameter plus the encoding, as one validated bundle."""
    model_config = ConfigDict(frozen=True)

    pbo: PBOParams = Field(default_factory=PBOParams)
    anneal: AnnealParams = Field(default_factory=AnnealParams)
    baseline: BaselineParams = Field(default_factory=BaselineParams)
    encoding: EncodingSpec = Field(default_factory=EncodingSpec)
    population: int = Field(default=50, ge=1)


# --- Population Containers ---


@dataclass(frozen=True)
class Individual:
    """A genome plus its cached objective; None marks a stale value."""
    genome: Genome
    raw_objective: Optional[float] = None
    norm_fitness: Optional[float] = None

    @property
    def is_stale(self) -> bool:
        return self.raw_objective is None

    def with_genome(self, genome: Genome) -> "Individual":
        return Individual(genome=genome)

    def with_objective(self, value: float) -> "Individual":
        return replace(self, raw_objective=float(value), norm_fitness=None)

    def with_fitness(self, fit: float) -> "Individual":
        return replace(self, norm_fitness=float(fit))


@dataclass(frozen=True)
class Population:
    individuals: List[Individual]
    generation: int = 0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        lengths = {len(ind.genome) for ind in self.individuals}
        if len(lengths) > 1:
            raise ValueError(f"Genomes of one population must share a length, got {sorted(lengths)}")

    def __len__(self) -> int:
        return len(self.individuals)

    def __getitem__(self, idx: int) -> Individual:
        return self.individuals[idx]

    @property
    def genome_length(self) -> int:
        return len(self.individuals[0].genome) if self.individuals else 0

    def objectives(self) -> np.ndarray:
        if any(ind.is_stale for ind in self.individuals):
            raise ValueError("Population has stale objectives; evaluate it first")
        return np.array([ind.raw_objective for ind in self.individuals], dtype=np.float64)

    def bit_matrix(self) -> np.ndarray:
        """(n, genome_length) uint8 matrix of all genomes."""
        return np.stack([ind.genome.bits for ind in self.individuals]) if self.individuals else np.zeros((0, 0), np.uint8)

    def replaced(self, individuals: List[Individual], generation: Optional[int] = None) -> "Population":
        return Population(
            individuals=list(individuals),
            generation=self.generation if generation is None else generation,
            rng_seed=self.rng_seed,
        )


# --- Run Records ---


@dataclass(frozen=True)
class GenerationRecord:
    """One CSV log row."""
    generation: int
    best_sad: float
    mean_sad: float
    p_ann: float
    mean_hamming: float


LOG_COLUMNS = ("generation", "best_sad", "mean_sad", "p_ann", "mean_hamming")


@dataclass
class EvolutionResult:
    population: Population
    log: List[GenerationRecord] = field(default_factory=list)

    @property
    def elite(self) -> Individual:
        from core.ga.selection import elite_index
        return self.population[elite_index(self.population)]
