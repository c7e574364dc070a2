from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from core.errors import OracleError
from core.ffd import ControlLattice, LatticeSpec
from core.fitness import GrayImage, sad, warp
from core.genome import EncodingSpec, Genome, decode_param

logger = logging.getLogger(__name__)

MAX_ORACLE_BITS = 20


@dataclass(frozen=True)
class OracleResult:
    genome: Genome
    value: float


def exhaustive_oracle(
    objective: Callable[[Genome], float],
    genome_length: int,
    bits_per_param: int = 1,
) -> OracleResult:
    """
    Global minimum over all 2^genome_length bit strings.

    Candidates are visited in increasing unsigned value and only a strictly
    better objective replaces the incumbent, so ties resolve to the lowest value.
    """
    if genome_length < 1 or genome_length > MAX_ORACLE_BITS:
        raise OracleError(f"Exhaustive search supports 1..{MAX_ORACLE_BITS} bits, got {genome_length}")
    if genome_length % bits_per_param:
        raise OracleError(f"{genome_length} bits is not a multiple of {bits_per_param}-bit groups")

    best_genome = Genome.from_int(0, genome_length, bits_per_param)
    best_value = float(objective(best_genome))
    for value in range(1, 1 << genome_length):
        genome = Genome.from_int(value, genome_length, bits_per_param)
        score = float(objective(genome))
        if score < best_value:
            best_genome, best_value = genome, score
    logger.debug(f"Oracle over {1 << genome_length} genomes: value {best_genome.to_int()}, objective {best_value}")
    return OracleResult(genome=best_genome, value=best_value)


class TranslationProblem:
    """
    One free scalar: a uniform x translation encoded with `bits` bits.

    The source is a horizontal intensity ramp; the target is the source
    warped by a uniform `shift` px translation, so the objective is minimized
    by the quantization level nearest `shift`.
    """

    def __init__(self, bits: int = 8, radius: float = 3.0, shift: float = 1.0, size: int = 16):
        self.encoding = EncodingSpec(bits_per_param=bits, radius=radius)
        self.shift = float(shift)
        self.spec = LatticeSpec(image_w=size, image_h=size, k=2, l=2)
        ramp = np.tile(np.linspace(0.0, 1.0, size), (size, 1))
        self.source = GrayImage(ramp)
        self.target = warp(self.source, ControlLattice.constant(self.spec, (self.shift, 0.0)))

    @property
    def genome_length(self) -> int:
        return self.encoding.bits_per_param

    def decode(self, genome: Genome) -> float:
        return decode_param(genome.bits, self.encoding)

    def __call__(self, genome: Genome) -> float:
        tx = self.decode(genome)
        moved = warp(self.source, ControlLattice.constant(self.spec, (tx, 0.0)))
        return sad(moved, self.target)

    def oracle(self) -> OracleResult:
        return exhaustive_oracle(self, self.genome_length, self.encoding.bits_per_param)
