from __future__ import annotations

import numpy as np

from core.errors import ImageDimensionError
from core.ffd import ControlLattice, displacement_at
from core.ga.diversity import hamming_diversity

__all__ = ["landmark_rmse", "hamming_diversity"]


def landmark_rmse(estimated: ControlLattice, gt: ControlLattice, landmarks: np.ndarray) -> float:
    """RMS distance in pixels between T_est(p) and T_gt(p) over the landmarks."""
    a, b = estimated.spec, gt.spec
    if (a.image_w, a.image_h) != (b.image_w, b.image_h):
        raise ImageDimensionError(
            f"Lattices cover different images: {a.image_w}x{a.image_h} vs {b.image_w}x{b.image_h}"
        )
    pts = np.asarray(landmarks, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("landmark_rmse needs at least one landmark")
    # both maps share the identity term, so only the offsets differ
    diff = displacement_at(estimated, pts[:, 0], pts[:, 1]) - displacement_at(gt, pts[:, 0], pts[:, 1])
    return float(np.sqrt(np.mean(np.sum(diff**2, axis=1))))
