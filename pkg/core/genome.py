"""
Bit-string representation of FFD parameters.

A genome is a flat string of B-bit groups, one group per scalar parameter,
read most-significant-bit first. Displacement genomes interleave (dx, dy)
per lattice node in row-major order.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.errors import EncodingError

logger = logging.getLogger(__name__)

BitsLike = Union[Sequence[int], np.ndarray, str]


class EncodingSpec(BaseModel):
    """Bits per scalar and the half-range r of every encoded scalar."""
    model_config = ConfigDict(frozen=True)

    bits_per_param: int = Field(default=5, ge=1, le=30)
    radius: float = Field(default=3.0, gt=0.0)

    @property
    def levels(self) -> int:
        return 1 << self.bits_per_param

    @property
    def step(self) -> float:
        """Distance between two adjacent quantization levels."""
        return 2.0 * self.radius / (self.levels - 1)


def _as_bits(bits: BitsLike) -> np.ndarray:
    if isinstance(bits, str):
        bits = [int(c) for c in bits if c in "01"]
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if arr.size and arr.max() > 1:
        raise EncodingError("Bit strings may only contain 0 and 1")
    return arr


@dataclass(frozen=True, eq=False)
class Genome:
    """Fixed-length bit string; immutable once built."""
    bits: np.ndarray
    bits_per_param: int

    def __post_init__(self) -> None:
        arr = _as_bits(self.bits).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)
        if self.bits_per_param < 1:
            raise EncodingError("bits per parameter must be positive")
        if arr.size % self.bits_per_param:
            raise EncodingError(
                f"Genome of {arr.size} bits is not a whole number of "
                f"{self.bits_per_param}-bit groups"
            )

    @property
    def n_params(self) -> int:
        return self.bits.size // self.bits_per_param

    def __len__(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Genome):
            return NotImplemented
        return (
            self.bits_per_param == other.bits_per_param
            and np.array_equal(self.bits, other.bits)
        )

    def __hash__(self) -> int:
        return hash((self.bits_per_param, self.bits.tobytes()))

    def __repr__(self) -> str:
        text = "".join(map(str, self.bits[:64].tolist()))
        suffix = "..." if self.bits.size > 64 else ""
        return f"Genome(B={self.bits_per_param}, bits={text}{suffix})"

    # --- Constructors ---

    @classmethod
    def zeros(cls, n_params: int, bits_per_param: int) -> "Genome":
        return cls(np.zeros(n_params * bits_per_param, dtype=np.uint8), bits_per_param)

    @classmethod
    def random(cls, rng: np.random.Generator, n_params: int, bits_per_param: int) -> "Genome":
        """Uniform random bit string."""
        bits = rng.integers(0, 2, size=n_params * bits_per_param, dtype=np.uint8)
        return cls(bits, bits_per_param)

    @classmethod
    def from_int(cls, value: int, length: int, bits_per_param: int) -> "Genome":
        """Genome whose bits are the unsigned `value`, MSB first."""
        if value < 0 or value >= (1 << length):
            raise EncodingError(f"{value} does not fit in {length} bits")
        bits = [(value >> (length - 1 - k)) & 1 for k in range(length)]
        return cls(np.asarray(bits, dtype=np.uint8), bits_per_param)

    def to_int(self) -> int:
        value = 0
        for b in self.bits.tolist():
            value = (value << 1) | b
        return value

    # --- Variation helpers ---

    def flipped(self, mask: np.ndarray) -> "Genome":
        """Copy with every bit where `mask` is true inverted."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != self.bits.shape:
            raise EncodingError(f"Flip mask shape {mask.shape} != genome shape {self.bits.shape}")
        return Genome(np.bitwise_xor(self.bits, mask.astype(np.uint8)), self.bits_per_param)

    def bit_orders(self) -> np.ndarray:
        """Significance of each bit inside its own parameter group (LSB = 0)."""
        b = self.bits_per_param
        return (b - 1) - (np.arange(self.bits.size) % b)


# =========================================================
# DECODING
# =========================================================


def _place_values(bits_per_param: int) -> np.ndarray:
    return (1 << np.arange(bits_per_param - 1, -1, -1)).astype(np.int64)


def group_values(bits: BitsLike, bits_per_param: int) -> np.ndarray:
    """Unsigned integer value of every B-bit group (MSB first)."""
    arr = _as_bits(bits)
    if arr.size % bits_per_param:
        raise EncodingError(f"{arr.size} bits cannot be split into {bits_per_param}-bit groups")
    return arr.reshape(-1, bits_per_param).astype(np.int64) @ _place_values(bits_per_param)


def _values_to_displacement(values: np.ndarray, spec: EncodingSpec) -> np.ndarray:
    top = spec.levels - 1
    return spec.radius * (2.0 * values - top) / top


def decode_param(bits: BitsLike, spec: EncodingSpec) -> float:
    """Map one B-bit group linearly onto [-r, r]."""
    arr = _as_bits(bits)
    if arr.size != spec.bits_per_param:
        raise EncodingError(f"Expected {spec.bits_per_param} bits, got {arr.size}")
    value = group_values(arr, spec.bits_per_param)[0]
    return float(_values_to_displacement(np.float64(value), spec))


def decode_params(genome: Genome, spec: EncodingSpec) -> np.ndarray:
    """Every scalar of the genome, without the per-node norm clamp."""
    if genome.bits_per_param != spec.bits_per_param:
        raise EncodingError(
            f"Genome uses {genome.bits_per_param} bits/param, encoding expects {spec.bits_per_param}"
        )
    values = group_values(genome.bits, spec.bits_per_param).astype(np.float64)
    return _values_to_displacement(values, spec)


def clamp_norms(vectors: np.ndarray, radius: float) -> np.ndarray:
    """Radially scale every row whose Euclidean norm exceeds `radius` back onto the circle."""
    vectors = np.asarray(vectors, dtype=np.float64).reshape(-1, 2)
    norms = np.hypot(vectors[:, 0], vectors[:, 1])
    scale = np.ones_like(norms)
    over = norms > radius
    scale[over] = radius / norms[over]
    return vectors * scale[:, None]


def decode_genome(genome: Genome, spec: EncodingSpec, n_nodes: Optional[int] = None) -> np.ndarray:
    """
    Decode a displacement genome into an (n_nodes, 2) array of (dx, dy).

    Args:
        genome: Interleaved (dx, dy) genome in row-major node order.
        spec: Encoding used to build the genome.
        n_nodes: Expected node count; a mismatch raises EncodingError.

    Returns:
        Displacements, each clamped to the disk of radius r.
    """
    if genome.n_params % 2:
        raise EncodingError(f"Displacement genomes need an even parameter count, got {genome.n_params}")
    if n_nodes is not None and genome.n_params != 2 * n_nodes:
        raise EncodingError(
            f"Genome encodes {genome.n_params // 2} nodes but the lattice has {n_nodes}"
        )
    scalars = decode_params(genome, spec)
    if scalars.size == 0:
        return np.zeros((0, 2), dtype=np.float64)
    return clamp_norms(scalars.reshape(-1, 2), spec.radius)


# =========================================================
# ENCODING
# =========================================================


def quantize(values: np.ndarray, spec: EncodingSpec) -> np.ndarray:
    """Nearest quantization level of each scalar after clamping to [-r, r]; ties go low."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise EncodingError("Cannot encode non-finite displacements")
    top = spec.levels - 1
    clipped = np.clip(values, -spec.radius, spec.radius)
    continuous = (clipped / spec.radius + 1.0) * top / 2.0
    levels = np.ceil(continuous - 0.5).astype(np.int64)
    return np.clip(levels, 0, top)


def encode_genome(vectors: np.ndarray, spec: EncodingSpec) -> Genome:
    """Quantize displacement vectors (any shape ending in 2) into an interleaved genome."""
    scalars = np.asarray(vectors, dtype=np.float64).reshape(-1)
    levels = quantize(scalars, spec)
    shifts = np.arange(spec.bits_per_param - 1, -1, -1)
    bits = ((levels[:, None] >> shifts[None, :]) & 1).astype(np.uint8).reshape(-1)
    return Genome(bits, spec.bits_per_param)
