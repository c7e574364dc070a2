"""
Coarse-to-fine controller.

Images are box-filtered into a dyadic pyramid; the lattice grows as
a_{n+1} = 2 a_n - 1 per level, and every level optimizes a bounded residual
on top of an inherited displacement: the best, on that level's images, of
every coarser result brought up through `inherit`.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.errors import ImageDimensionError, PyramidError
from core.ffd import ControlLattice, LatticeSpec, displacement_at
from core.fitness import GrayImage, RegistrationObjective, sad, warp
from core.ga import GAConfig, GenerationRecord, StrategyFactory, evolve, initial_population
from core.ga.rng import derive_seed
from core.genome import encode_genome

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[str, str], None]


# --- Schedule ---


class LevelSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    image_w: int = Field(ge=1)
    image_h: int = Field(ge=1)
    k: int = Field(ge=2)
    l: int = Field(ge=2)
    generations: int = Field(ge=0)
    population: int = Field(ge=1)

    def lattice_spec(self) -> LatticeSpec:
        return LatticeSpec(image_w=self.image_w, image_h=self.image_h, k=self.k, l=self.l)


class PyramidSchedule(BaseModel):
    """Per-level image and lattice sizes, ordered coarse to fine."""
    model_config = ConfigDict(frozen=True)

    levels: List[LevelSpec]
    base_k: int = Field(ge=2)
    base_l: int = Field(ge=2)

    @model_validator(mode="after")
    def check_progression(self) -> "PyramidSchedule":
        if not self.levels:
            raise ValueError("A schedule needs at least one level")
        first = self.levels[0]
        if (first.k, first.l) != (self.base_k, self.base_l):
            raise ValueError("Coarsest level must use the base lattice size")
        for coarse, fine in zip(self.levels, self.levels[1:]):
            if (fine.k, fine.l) != (refine_lattice_size(coarse.k), refine_lattice_size(coarse.l)):
                raise ValueError(f"Lattice {coarse.k}x{coarse.l} must refine to 2a-1, got {fine.k}x{fine.l}")
            if fine.image_w // 2 != coarse.image_w or fine.image_h // 2 != coarse.image_h:
                raise ValueError(
                    f"Level {coarse.image_w}x{coarse.image_h} is not the half of {fine.image_w}x{fine.image_h}"
                )
        return self

    @classmethod
    def build(
        cls,
        image_w: int,
        image_h: int,
        levels: int = 3,
        base_k: int = 3,
        base_l: int = 3,
        generations: int = 200,
        population: int = 50,
    ) -> "PyramidSchedule":
        """Dyadic schedule whose finest level is the full image."""
        _check_depth(image_w, image_h, levels)
        specs = []
        k, l = base_k, base_l
        for n in range(levels):
            factor = 1 << (levels - 1 - n)
            specs.append(
                LevelSpec(
                    image_w=image_w // factor,
                    image_h=image_h // factor,
                    k=k,
                    l=l,
                    generations=generations,
                    population=population,
                )
            )
            k, l = refine_lattice_size(k), refine_lattice_size(l)
        return cls(levels=specs, base_k=base_k, base_l=base_l)


def _check_depth(w: int, h: int, levels: int) -> None:
    if levels < 1:
        raise PyramidError(f"Pyramid depth must be at least 1, got {levels}")
    need = 1 << (levels - 1)
    if w < need or h < need:
        raise PyramidError(f"A {w}x{h} image is too small for {levels} levels (needs {need}px per axis)")


# --- Image Pyramid ---


def downsample(img: GrayImage) -> GrayImage:
    """2x2 box filter; odd trailing rows/columns are dropped."""
    h2, w2 = img.h // 2, img.w // 2
    block = img.data[: 2 * h2, : 2 * w2].reshape(h2, 2, w2, 2)
    return GrayImage(np.clip(block.mean(axis=(1, 3)), 0.0, 1.0))


def build_pyramid(img: GrayImage, levels: int) -> List[GrayImage]:
    """Images ordered coarse to fine; the last one is `img` itself."""
    _check_depth(img.w, img.h, levels)
    pyramid = [img]
    for _ in range(levels - 1):
        pyramid.append(downsample(pyramid[-1]))
    return pyramid[::-1]


def refine_lattice_size(a: int) -> int:
    if a < 2:
        raise PyramidError(f"Lattice size must be at least 2, got {a}")
    return 2 * a - 1


# --- Inheritance ---


def inherit(coarse: ControlLattice, coarse_img_dims: Tuple[int, int], fine_spec: LatticeSpec) -> ControlLattice:
    """
    Baseline lattice for the next finer level.

    Each fine node takes the coarse FFD displacement evaluated at its own
    position mapped into coarse pixels (clamped onto the coarse domain),
    scaled by the image size ratio.
    """
    cw, ch = coarse_img_dims
    cspec = coarse.spec
    if (cspec.image_w, cspec.image_h) != (cw, ch):
        raise PyramidError(f"Coarse lattice covers {cspec.image_w}x{cspec.image_h}, not {cw}x{ch}")
    if (fine_spec.k, fine_spec.l) != (refine_lattice_size(cspec.k), refine_lattice_size(cspec.l)):
        raise PyramidError(
            f"Fine lattice {fine_spec.k}x{fine_spec.l} does not refine coarse {cspec.k}x{cspec.l}"
        )
    if fine_spec.image_w // 2 != cw or fine_spec.image_h // 2 != ch:
        raise PyramidError(
            f"Fine image {fine_spec.image_w}x{fine_spec.image_h} is not twice {cw}x{ch}"
        )

    sx = fine_spec.image_w / cw
    sy = fine_spec.image_h / ch
    positions = ControlLattice.zeros(fine_spec).node_positions()
    offsets = displacement_at(coarse, positions[:, 0] / sx, positions[:, 1] / sy, clamp=True)
    return ControlLattice.from_vectors(fine_spec, offsets * np.array([sx, sy]))


def best_baseline(candidates: List[ControlLattice], source: GrayImage, target: GrayImage) -> ControlLattice:
    """Lowest-SAD candidate; ties go to the earliest."""
    return min(candidates, key=lambda lat: sad(warp(source, lat), target))


# --- Coarse-to-fine Run ---


@dataclass
class LevelResult:
    level: int
    spec: LatticeSpec
    baseline: ControlLattice
    lattice: ControlLattice
    elite_sad: float
    log: List[GenerationRecord] = field(default_factory=list)
    seconds: float = 0.0


@dataclass
class CoarseToFineResult:
    lattice: ControlLattice
    levels: List[LevelResult] = field(default_factory=list)

    @property
    def elite_sad(self) -> float:
        return self.levels[-1].elite_sad


def _level_strategy(name: str, ga: GAConfig, generations: int):
    config = {
        "pbo": ga.pbo,
        "anneal": ga.anneal.model_copy(update={"g_size": max(1, generations)}),
        "baseline": ga.baseline.model_copy(update={"g_size": generations}),
    }
    return StrategyFactory.get_strategy(name, config)


def run_coarse_to_fine(
    source: GrayImage,
    target: GrayImage,
    sched: PyramidSchedule,
    ga: GAConfig,
    seed: int = 0,
    strategy: str = "pbo",
    threads: int = 1,
    recorder=None,
    on_progress: Optional[ProgressCallback] = None,
) -> CoarseToFineResult:
    """
    Optimize every pyramid level in turn, coarse to fine.

    Args:
        source, target: Full-resolution images of equal size.
        sched: Level sizes; its finest level must match the images.
        ga: Hyperparameters and encoding.
        seed: Master seed; level n uses a seed derived from (seed, n).
        strategy: Registered variation strategy name.
        threads: Objective evaluation workers.
        recorder: Optional LevelRecorder receiving every finished level.
        on_progress: Optional (message, colour) callback.

    Returns:
        Finest-level total lattice plus per-level results.
    """
    def log(msg: str, style: str = "white") -> None:
        logger.info(msg)
        if on_progress:
            on_progress(msg, style)

    if source.data.shape != target.data.shape:
        raise ImageDimensionError(f"Source {source.w}x{source.h} and target {target.w}x{target.h} differ")
    finest = sched.levels[-1]
    if (finest.image_w, finest.image_h) != (source.w, source.h):
        raise PyramidError(
            f"Schedule ends at {finest.image_w}x{finest.image_h}, images are {source.w}x{source.h}"
        )

    n_levels = len(sched.levels)
    src_pyr = build_pyramid(source, n_levels)
    tgt_pyr = build_pyramid(target, n_levels)
    enc = ga.encoding

    results: List[LevelResult] = []
    # every finished level's lattice brought to the latest level, newest first
    carried: List[ControlLattice] = []
    for n, level in enumerate(sched.levels):
        started = time.perf_counter()
        spec = level.lattice_spec()
        if carried:
            dims = (carried[0].spec.image_w, carried[0].spec.image_h)
            carried = [inherit(lat, dims, spec) for lat in carried]
            baseline = best_baseline(carried, src_pyr[n], tgt_pyr[n])
            if baseline is not carried[0]:
                logger.debug(f"Level {n}: an earlier level's upsampled result beats the previous one")
        else:
            baseline = ControlLattice.zeros(spec)

        # the seeded genome decodes to exactly zero residual
        pure_inheritance = encode_genome(np.zeros((spec.n_nodes, 2)), enc)
        objective = RegistrationObjective(src_pyr[n], tgt_pyr[n], spec, enc, baseline, origin=pure_inheritance)
        pop = initial_population(
            derive_seed(seed, n),
            level.population,
            2 * spec.n_nodes,
            enc.bits_per_param,
            seeded=[pure_inheritance],
        )
        log(
            f"Level {n + 1}/{n_levels}: {spec.image_w}x{spec.image_h} px, lattice {spec.k}x{spec.l}, "
            f"{level.population} x {level.generations} generations ({strategy})",
            "yellow",
        )

        evolution = evolve(
            pop,
            _level_strategy(strategy, ga, level.generations),
            objective,
            threads=threads,
            generations=level.generations,
        )
        if evolution.log:
            elite = evolution.elite
            elite_sad = float(elite.raw_objective)
            lattice = objective.lattice_for(elite.genome)
        else:
            lattice = objective.lattice_for(pure_inheritance)
            elite_sad = objective(pure_inheritance)

        result = LevelResult(
            level=n,
            spec=spec,
            baseline=baseline,
            lattice=lattice,
            elite_sad=elite_sad,
            log=evolution.log,
            seconds=time.perf_counter() - started,
        )
        results.append(result)
        if recorder is not None:
            recorder.save_level(result)
        log(f"Level {n + 1}/{n_levels} done: elite SAD {elite_sad:.4f} ({result.seconds:.1f}s)", "green")
        carried.insert(0, lattice)

    return CoarseToFineResult(lattice=carried[0], levels=results)
