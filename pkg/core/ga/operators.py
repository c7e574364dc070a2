"""
Probabilistic bitwise operation and the annealing selection rate.

Bit order is counted inside each parameter's own B-bit group with the least
significant bit at order 0, so low-order bits flip most often.
"""
from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

from core.ga.schemas import AnnealParams, Individual, PBOParams

ArrayLike = Union[float, int, np.ndarray]


def compute_inversion_probability(bit_index: ArrayLike, norm_fitness: ArrayLike, p: PBOParams) -> ArrayLike:
    """
    P_inv = w_max * exp(-(bit^2 / s_bit^2 + fit^2 / s_fit^2) / 2)

    Accepts scalars or broadcastable arrays; scalars in, float out.
    """
    bit = np.asarray(bit_index, dtype=np.float64)
    fit = np.asarray(norm_fitness, dtype=np.float64)
    exponent = -0.5 * (bit**2 / p.s_bit**2 + fit**2 / p.s_fit**2)
    prob = p.w_max * np.exp(exponent)
    return float(prob) if prob.ndim == 0 else prob


def normalize_fitness(objectives: Sequence[float]) -> np.ndarray:
    """
    Min-max normalization with the best (lowest) objective mapped to 1.

    A population whose objectives are all equal gets fitness 1 everywhere.
    """
    values = np.asarray(objectives, dtype=np.float64)
    if values.size == 0:
        raise ValueError("Cannot normalize an empty population")
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.ones_like(values)
    return (hi - values) / (hi - lo)


def apply_pbo(ind: Individual, p: PBOParams, rng: np.random.Generator) -> Individual:
    """Invert each bit independently with its own probability; the result is stale."""
    if ind.norm_fitness is None:
        raise ValueError("apply_pbo needs a normalized fitness")
    probs = compute_inversion_probability(ind.genome.bit_orders(), ind.norm_fitness, p)
    mask = rng.random(len(ind.genome)) < probs
    return ind.with_genome(ind.genome.flipped(mask))


def annealing_rate(i: int, a: AnnealParams) -> float:
    """
    P_ann(i) = (1 - exp(e i / G)) / (exp(e) - 1) * (1 - P_min) + 1

    Equals 1 at i = 0 and P_min at i = G, decreasing in between.
    """
    if i < 0 or i > a.g_size:
        raise ValueError(f"Generation index {i} outside 0..{a.g_size}")
    ratio = -math.expm1(a.e * i / a.g_size) / math.expm1(a.e)
    return ratio * (1.0 - a.p_min) + 1.0
