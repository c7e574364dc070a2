from pathlib import Path
from typing import List, Optional

import numpy as np

from core.bench.synth import procedural_texture
from core.ffd import ControlLattice, LatticeSpec
from core.fitness import GrayImage
from core.ga import Individual, Population, initial_population
from core.genome import Genome
from parsers import image_parser


class RegistrationFixtures:
    """Collection of images, lattices and populations shared by the test suites."""

    @staticmethod
    def gradient_image(w: int = 16, h: int = 16) -> GrayImage:
        """Horizontal ramp from 0 to 1."""
        return GrayImage(np.tile(np.linspace(0.0, 1.0, w), (h, 1)))

    @staticmethod
    def texture(size: int = 32, seed: int = 7) -> GrayImage:
        """Smooth procedural texture."""
        return procedural_texture(seed, size=size, n_blobs=12)

    @staticmethod
    def spec(w: int = 32, h: int = 32, k: int = 3, l: int = 3) -> LatticeSpec:
        return LatticeSpec(image_w=w, image_h=h, k=k, l=l)

    @staticmethod
    def random_lattice(spec: LatticeSpec, radius: float = 2.0, seed: int = 0) -> ControlLattice:
        rng = np.random.default_rng(seed)
        return ControlLattice.from_vectors(spec, rng.uniform(-radius, radius, size=(spec.n_nodes, 2)))

    @staticmethod
    def evaluated_population(objectives: List[float], length: int = 8, seed: int = 0) -> Population:
        """Population of random genomes with the given objectives already cached and normalized."""
        from core.ga import normalize_fitness
        rng = np.random.default_rng(seed)
        fits = normalize_fitness(objectives)
        individuals = [
            Individual(genome=Genome.random(rng, 1, length), raw_objective=float(o), norm_fitness=float(f))
            for o, f in zip(objectives, fits)
        ]
        return Population(individuals=individuals, generation=0, rng_seed=seed)

    @staticmethod
    def toy_population(seed: int, size: int = 20, bits: int = 4) -> Population:
        """Random single-parameter population for the translation toy problem."""
        return initial_population(seed, size, 1, bits)

    @staticmethod
    def write_image(img: GrayImage, path: Path) -> Path:
        return image_parser().write(img, path)


def unsigned_value_objective(genome: Genome) -> float:
    return float(genome.to_int())


def constant_objective(genome: Genome) -> float:
    return 1.0


def ones_count_objective(genome: Genome) -> float:
    """Minimized by the all-zero genome."""
    return float(int(genome.bits.sum()))


def zero_lattice(spec: Optional[LatticeSpec] = None) -> ControlLattice:
    return ControlLattice.zeros(spec or RegistrationFixtures.spec())
