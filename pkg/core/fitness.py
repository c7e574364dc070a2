"""Grayscale rasters, bilinear resampling, lattice warping and the SAD objective."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from core.errors import ImageDimensionError, LatticeError
from core.ffd import ControlLattice, FieldOperator, LatticeSpec, displacement_field, pixel_grid
from core.genome import EncodingSpec, Genome, decode_genome

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GrayImage:
    """W x H raster with intensities in [0, 1]; data is indexed [y, x]."""
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ImageDimensionError(f"GrayImage needs a non-empty 2D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("GrayImage intensities must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError(f"GrayImage intensities must lie in [0, 1], got [{arr.min()}, {arr.max()}]")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def w(self) -> int:
        return int(self.data.shape[1])

    @property
    def h(self) -> int:
        return int(self.data.shape[0])

    @classmethod
    def filled(cls, w: int, h: int, value: float) -> "GrayImage":
        return cls(np.full((h, w), value, dtype=np.float64))

    @classmethod
    def from_uint8(cls, pixels: np.ndarray) -> "GrayImage":
        return cls(np.asarray(pixels, dtype=np.float64) / 255.0)

    def to_uint8(self) -> np.ndarray:
        return np.clip(np.rint(self.data * 255.0), 0, 255).astype(np.uint8)


def _check_same_dims(a: GrayImage, b: GrayImage) -> None:
    if a.data.shape != b.data.shape:
        raise ImageDimensionError(f"Image sizes differ: {a.w}x{a.h} vs {b.w}x{b.h}")


def _bilinear(data: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Clamp-to-edge bilinear interpolation at (xs, ys)."""
    h, w = data.shape
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    out = ndimage.map_coordinates(data, [ys, xs], order=1, mode="nearest", prefilter=False)
    return np.clip(out, 0.0, 1.0)


def sample_bilinear(img: GrayImage, p: Sequence[float]) -> float:
    """Intensity at an arbitrary point; coordinates outside the raster clamp to the edge."""
    value = _bilinear(img.data, np.array([float(p[0])]), np.array([float(p[1])]))
    return float(value[0])


def _warp_with_field(source: GrayImage, field: np.ndarray) -> np.ndarray:
    xs, ys = pixel_grid(source.w, source.h)
    return _bilinear(source.data, xs + field[..., 0], ys + field[..., 1])


def _check_lattice_fits(source: GrayImage, spec: LatticeSpec) -> None:
    if (spec.image_w, spec.image_h) != (source.w, source.h):
        raise ImageDimensionError(
            f"Lattice covers {spec.image_w}x{spec.image_h} but the image is {source.w}x{source.h}"
        )


def warp(source: GrayImage, lat: ControlLattice) -> GrayImage:
    """Backward warp: out(x) = source(map_point(x))."""
    _check_lattice_fits(source, lat.spec)
    field = displacement_field(lat, source.w, source.h)
    return GrayImage(_warp_with_field(source, field))


def sad(a: GrayImage, b: GrayImage) -> float:
    """Sum of absolute intensity differences."""
    _check_same_dims(a, b)
    return float(np.abs(a.data - b.data).sum())


class RegistrationObjective:
    """
    Genome -> SAD for one pyramid level.

    The lattice evaluated for a genome is `baseline + decode_genome(genome)`,
    or `baseline + decode_genome(genome) - decode_genome(origin)` when an
    origin genome is given, so that the origin stands for the baseline exactly.
    Instances hold only read-only state, so __call__ is safe from many threads.
    """

    def __init__(
        self,
        source: GrayImage,
        target: GrayImage,
        spec: LatticeSpec,
        enc: EncodingSpec,
        baseline: Optional[ControlLattice] = None,
        origin: Optional[Genome] = None,
    ):
        _check_same_dims(source, target)
        _check_lattice_fits(source, spec)
        if baseline is not None and baseline.spec != spec:
            raise LatticeError("Baseline lattice spec does not match the level spec")
        self.source = source
        self.target = target
        self.spec = spec
        self.enc = enc
        self.baseline = baseline if baseline is not None else ControlLattice.zeros(spec)
        self._operator = FieldOperator(spec, source.w, source.h)
        self._baseline_vectors = self.baseline.vectors()
        self._origin_vectors = (
            decode_genome(origin, enc, spec.n_nodes) if origin is not None else np.zeros((spec.n_nodes, 2))
        )

    @property
    def genome_length(self) -> int:
        return 2 * self.spec.n_nodes * self.enc.bits_per_param

    def residual(self, genome: Genome) -> np.ndarray:
        return decode_genome(genome, self.enc, self.spec.n_nodes) - self._origin_vectors

    def lattice_for(self, genome: Genome) -> ControlLattice:
        """Total lattice (baseline + residual) a genome stands for."""
        return self.baseline.plus_vectors(self.residual(genome))

    def warped(self, genome: Genome) -> GrayImage:
        field = self._operator.apply(self._baseline_vectors + self.residual(genome))
        return GrayImage(_warp_with_field(self.source, field))

    def __call__(self, genome: Genome) -> float:
        return sad(self.warped(genome), self.target)


def objective(
    genome: Genome,
    source: GrayImage,
    target: GrayImage,
    spec: LatticeSpec,
    enc: EncodingSpec,
    baseline: Optional[ControlLattice] = None,
) -> float:
    """One-shot form of RegistrationObjective."""
    return RegistrationObjective(source, target, spec, enc, baseline)(genome)
