from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist

from core.ga.schemas import Population


def hamming_diversity(pop: Population) -> float:
    """Mean pairwise Hamming distance divided by genome length, in [0, 1]."""
    if len(pop) < 2:
        raise ValueError(f"Diversity needs at least 2 individuals, got {len(pop)}")
    if pop.genome_length == 0:
        return 0.0
    return float(np.mean(pdist(pop.bit_matrix().astype(bool), metric="hamming")))
