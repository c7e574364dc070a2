"""
2D cubic B-spline free-form deformation.

Node (i, j) of a lattice sits at (i * dx, j * dy) for i in -1..K and j in -1..L,
so the border ring lies one spacing outside the image. Displacement arrays are
stored as (L + 2, K + 2, 2) with array index [j + 1, i + 1].
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse

from core.errors import DomainError, LatticeError

logger = logging.getLogger(__name__)


class LatticeSpec(BaseModel):
    """Image size in pixels and the K x L control points covering it."""
    model_config = ConfigDict(frozen=True)

    image_w: int = Field(ge=1)
    image_h: int = Field(ge=1)
    k: int = Field(ge=2)
    l: int = Field(ge=2)

    @property
    def delta_x(self) -> float:
        return self.image_w / (self.k - 1)

    @property
    def delta_y(self) -> float:
        return self.image_h / (self.l - 1)

    @property
    def grid_shape(self) -> Tuple[int, int]:
        """(rows, cols) of the displacement grid, border ring included."""
        return self.l + 2, self.k + 2

    @property
    def n_nodes(self) -> int:
        rows, cols = self.grid_shape
        return rows * cols


@dataclass(frozen=True, eq=False)
class ControlLattice:
    """FFD parameter set: one displacement vector per control node."""
    spec: LatticeSpec
    displacements: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.displacements, dtype=np.float64)
        expected = (*self.spec.grid_shape, 2)
        if arr.shape != expected:
            raise LatticeError(f"Displacement grid has shape {arr.shape}, expected {expected}")
        arr.setflags(write=False)
        object.__setattr__(self, "displacements", arr)

    @classmethod
    def zeros(cls, spec: LatticeSpec) -> "ControlLattice":
        return cls(spec, np.zeros((*spec.grid_shape, 2)))

    @classmethod
    def constant(cls, spec: LatticeSpec, offset: Sequence[float]) -> "ControlLattice":
        grid = np.zeros((*spec.grid_shape, 2))
        grid[...] = np.asarray(offset, dtype=np.float64)
        return cls(spec, grid)

    @classmethod
    def from_vectors(cls, spec: LatticeSpec, vectors: np.ndarray) -> "ControlLattice":
        """Build from (n_nodes, 2) vectors in row-major node order."""
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.shape != (spec.n_nodes, 2):
            raise LatticeError(f"Expected {spec.n_nodes} vectors, got array of shape {vectors.shape}")
        return cls(spec, vectors.reshape(*spec.grid_shape, 2))

    def vectors(self) -> np.ndarray:
        return self.displacements.reshape(-1, 2)

    def node_positions(self) -> np.ndarray:
        """(n_nodes, 2) pixel positions of the nodes, row-major, origin (-1, -1)."""
        rows, cols = self.spec.grid_shape
        jj, ii = np.meshgrid(np.arange(rows) - 1, np.arange(cols) - 1, indexing="ij")
        return np.stack([ii * self.spec.delta_x, jj * self.spec.delta_y], axis=-1).reshape(-1, 2)

    def max_norm(self) -> float:
        vec = self.vectors()
        return float(np.max(np.hypot(vec[:, 0], vec[:, 1]))) if vec.size else 0.0

    def __add__(self, other: "ControlLattice") -> "ControlLattice":
        if other.spec != self.spec:
            raise LatticeError("Cannot add lattices with different specs")
        return ControlLattice(self.spec, self.displacements + other.displacements)

    def plus_vectors(self, vectors: np.ndarray) -> "ControlLattice":
        return self + ControlLattice.from_vectors(self.spec, vectors)


# =========================================================
# BASIS
# =========================================================


def basis(index: int, t: float) -> float:
    """Uniform cubic B-spline basis function B_index(t)."""
    if index == 0:
        return (1.0 - t) ** 3 / 6.0
    if index == 1:
        return (3.0 * t**3 - 6.0 * t**2 + 4.0) / 6.0
    if index == 2:
        return (-3.0 * t**3 + 3.0 * t**2 + 3.0 * t + 1.0) / 6.0
    if index == 3:
        return t**3 / 6.0
    raise ValueError(f"Basis index must be in 0..3, got {index}")


def basis_weights(t: np.ndarray) -> np.ndarray:
    """All four basis weights for every t; shape t.shape + (4,)."""
    t = np.asarray(t, dtype=np.float64)
    t2 = t * t
    t3 = t2 * t
    return np.stack(
        [
            (1.0 - t) ** 3 / 6.0,
            (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
            (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0,
            t3 / 6.0,
        ],
        axis=-1,
    )


# =========================================================
# EVALUATION
# =========================================================


def _cells(coords: np.ndarray, delta: float, n_points: int) -> Tuple[np.ndarray, np.ndarray]:
    """First array index of the 4-node support and the local coordinate."""
    scaled = coords / delta
    cell = np.floor(scaled).astype(np.int64)
    # x -> W from below can round onto the last knot
    cell = np.clip(cell, 0, n_points - 2)
    return cell, scaled - cell


def _support(spec: LatticeSpec, xs: np.ndarray, ys: np.ndarray):
    cx, u = _cells(xs, spec.delta_x, spec.k)
    cy, v = _cells(ys, spec.delta_y, spec.l)
    return cx, cy, basis_weights(u), basis_weights(v)


def _check_domain(spec: LatticeSpec, xs: np.ndarray, ys: np.ndarray) -> None:
    inside = (xs >= 0) & (xs < spec.image_w) & (ys >= 0) & (ys < spec.image_h)
    if not np.all(inside):
        bad = int(np.argmin(inside))
        raise DomainError(
            f"Point ({xs.flat[bad]}, {ys.flat[bad]}) outside image domain "
            f"[0, {spec.image_w}) x [0, {spec.image_h})"
        )


def displacement_at(lat: ControlLattice, xs: np.ndarray, ys: np.ndarray, clamp: bool = False) -> np.ndarray:
    """
    FFD offsets at arbitrary points.

    Args:
        lat: Control lattice.
        xs, ys: Point coordinates (same shape).
        clamp: Project points onto the closed domain instead of rejecting them.

    Returns:
        Array of shape xs.shape + (2,).
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape:
        raise DomainError(f"Coordinate arrays differ in shape: {xs.shape} vs {ys.shape}")
    spec = lat.spec
    if clamp:
        xs = np.clip(xs, 0.0, float(spec.image_w))
        ys = np.clip(ys, 0.0, float(spec.image_h))
    else:
        _check_domain(spec, xs, ys)

    flat_x, flat_y = xs.ravel(), ys.ravel()
    cx, cy, wx, wy = _support(spec, flat_x, flat_y)
    offs = np.arange(4)
    rows = cy[:, None] + offs[None, :]
    cols = cx[:, None] + offs[None, :]
    gathered = lat.displacements[rows[:, :, None], cols[:, None, :]]
    out = np.einsum("nm,nl,nmlc->nc", wy, wx, gathered)
    return out.reshape(*xs.shape, 2)


def map_point(p: Sequence[float], lat: ControlLattice) -> np.ndarray:
    """Deformed position x' of a source point x."""
    x, y = float(p[0]), float(p[1])
    offset = displacement_at(lat, np.array([x]), np.array([y]))[0]
    return np.array([x, y]) + offset


def pixel_grid(w: int, h: int) -> Tuple[np.ndarray, np.ndarray]:
    """(xs, ys) of every integer pixel, each of shape (h, w)."""
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    return xs, ys


def displacement_field(lat: ControlLattice, w: int, h: int) -> np.ndarray:
    """Dense (h, w, 2) field of map_point(x) - x at integer pixels."""
    if w < 1 or h < 1:
        raise DomainError(f"Field size must be positive, got {w}x{h}")
    xs, ys = pixel_grid(w, h)
    return displacement_at(lat, xs, ys)


class FieldOperator:
    """
    Precomputed sparse weight matrix mapping node displacements to a dense field.

    Built once per (spec, w, h); apply() is a single sparse product.
    """

    def __init__(self, spec: LatticeSpec, w: int, h: int):
        if w < 1 or h < 1:
            raise DomainError(f"Field size must be positive, got {w}x{h}")
        self.spec = spec
        self.w = w
        self.h = h
        xs, ys = pixel_grid(w, h)
        flat_x, flat_y = xs.ravel(), ys.ravel()
        _check_domain(spec, flat_x, flat_y)
        cx, cy, wx, wy = _support(spec, flat_x, flat_y)

        n = flat_x.size
        cols_per_row = spec.k + 2
        offs = np.arange(4)
        node_rows = cy[:, None, None] + offs[None, :, None]
        node_cols = cx[:, None, None] + offs[None, None, :]
        node_index = (node_rows * cols_per_row + node_cols).reshape(n, 16)
        weights = (wy[:, :, None] * wx[:, None, :]).reshape(n, 16)
        pixel_index = np.repeat(np.arange(n), 16)
        self.matrix = sparse.csr_matrix(
            (weights.ravel(), (pixel_index, node_index.ravel())),
            shape=(n, spec.n_nodes),
        )

    def apply(self, displacements: np.ndarray) -> np.ndarray:
        """Dense (h, w, 2) field for an (n_nodes, 2) or grid-shaped displacement array."""
        vec = np.asarray(displacements, dtype=np.float64).reshape(-1, 2)
        if vec.shape[0] != self.spec.n_nodes:
            raise LatticeError(f"Expected {self.spec.n_nodes} node vectors, got {vec.shape[0]}")
        return (self.matrix @ vec).reshape(self.h, self.w, 2)

    def field(self, lat: ControlLattice) -> np.ndarray:
        if lat.spec != self.spec:
            raise LatticeError("Lattice spec does not match the operator")
        return self.apply(lat.displacements)
