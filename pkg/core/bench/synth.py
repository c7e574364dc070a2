"""Synthetic registration cases: procedural textures and random ground-truth FFDs."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.ffd import ControlLattice, LatticeSpec
from core.fitness import GrayImage, warp
from core.ga.rng import Purpose, substream

logger = logging.getLogger(__name__)

LANDMARK_GRID = 5


@dataclass(frozen=True, eq=False)
class SyntheticCase:
    case_id: int
    gt_lattice: ControlLattice
    source: GrayImage
    target: GrayImage
    landmarks: np.ndarray


def procedural_texture(seed: int, size: int = 128, n_blobs: int = 24) -> GrayImage:
    """
    Smooth random texture: a sum of signed Gaussian blobs, min-max scaled to [0, 1].
    """
    if size < 1 or n_blobs < 1:
        raise ValueError(f"Texture needs size >= 1 and n_blobs >= 1, got {size}, {n_blobs}")
    rng = substream(seed, 0, 0, Purpose.TEXTURE)
    centers = rng.uniform(0.0, size, size=(n_blobs, 2))
    sigmas = rng.uniform(size / 20.0, size / 6.0, size=n_blobs)
    amplitudes = rng.uniform(-1.0, 1.0, size=n_blobs)

    coords = np.arange(size, dtype=np.float64)
    dx2 = (coords[None, :] - centers[:, 0:1]) ** 2  # (n_blobs, W)
    dy2 = (coords[None, :] - centers[:, 1:2]) ** 2  # (n_blobs, H)
    inv = 1.0 / (2.0 * sigmas**2)
    gx = np.exp(-dx2 * inv[:, None])
    gy = np.exp(-dy2 * inv[:, None])
    field = np.einsum("b,by,bx->yx", amplitudes, gy, gx)

    lo, hi = float(field.min()), float(field.max())
    if hi - lo < 1e-12:
        return GrayImage.filled(size, size, 0.5)
    return GrayImage((field - lo) / (hi - lo))


def landmark_grid(w: int, h: int, n: int = LANDMARK_GRID) -> np.ndarray:
    """n x n interior points at ((a + 1) W / (n + 1), (b + 1) H / (n + 1)), row-major."""
    xs = (np.arange(n) + 1) * w / (n + 1)
    ys = (np.arange(n) + 1) * h / (n + 1)
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return np.stack([xx.ravel(), yy.ravel()], axis=-1)


def sample_disk(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """n points uniform on the closed disk of the given radius."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


def generate_case(
    seed: int,
    image: GrayImage,
    gt_k: int = 5,
    gt_l: int = 5,
    gt_radius: float = 8.0,
    case_id: int = 0,
) -> SyntheticCase:
    """
    Random ground-truth deformation of `image`.

    Every gt node displacement is uniform on the disk of radius `gt_radius`;
    the target is the source warped by that lattice. gt_radius = 0 yields
    the identity case.
    """
    if gt_radius < 0:
        raise ValueError(f"gt_radius must be non-negative, got {gt_radius}")
    spec = LatticeSpec(image_w=image.w, image_h=image.h, k=gt_k, l=gt_l)
    rng = substream(seed, case_id, Purpose.CASE)
    vectors = sample_disk(rng, spec.n_nodes, gt_radius) if gt_radius > 0 else np.zeros((spec.n_nodes, 2))
    gt = ControlLattice.from_vectors(spec, vectors)
    target = warp(image, gt)
    logger.debug(f"Case {case_id}: {gt_k}x{gt_l} gt lattice, max node norm {gt.max_norm():.2f}px")
    return SyntheticCase(
        case_id=case_id,
        gt_lattice=gt,
        source=image,
        target=target,
        landmarks=landmark_grid(image.w, image.h),
    )
