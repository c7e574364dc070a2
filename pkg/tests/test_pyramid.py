from __future__ import annotations

import os
import unittest

import numpy as np
from pydantic import ValidationError

from core.errors import ImageDimensionError, PyramidError
from core.ffd import ControlLattice, LatticeSpec, displacement_at
from core.bench import generate_case
from core.fitness import GrayImage, sad, warp
from core.ga import GAConfig
from core.genome import EncodingSpec
from core.pyramid import (
    LevelSpec,
    PyramidSchedule,
    best_baseline,
    build_pyramid,
    downsample,
    inherit,
    refine_lattice_size,
    run_coarse_to_fine,
)
from tests.fixtures import RegistrationFixtures

SLOW = os.environ.get("PBGA_SLOW_TESTS") == "1"


def small_ga(population: int = 8) -> GAConfig:
    return GAConfig(population=population, encoding=EncodingSpec(bits_per_param=5, radius=3.0))


def upsampled_to_finest(result, level: int) -> ControlLattice:
    """The lattice of `level` carried up to the finest level through inherit."""
    lat = result.levels[level].lattice
    for finer in result.levels[level + 1:]:
        lat = inherit(lat, (lat.spec.image_w, lat.spec.image_h), finer.spec)
    return lat


class TestRefineLatticeSize(unittest.TestCase):
    """Test refine_lattice_size."""

    def test_values(self):
        """3 -> 5 -> 9 and 2 -> 3."""
        self.assertEqual(refine_lattice_size(3), 5)
        self.assertEqual(refine_lattice_size(5), 9)
        self.assertEqual(refine_lattice_size(2), 3)

    def test_too_small(self):
        """A lattice needs two points per axis."""
        with self.assertRaises(PyramidError):
            refine_lattice_size(1)


class TestBuildPyramid(unittest.TestCase):
    """Test build_pyramid and downsample."""

    def test_single_level(self):
        """levels=1 returns the input."""
        img = RegistrationFixtures.texture()
        pyr = build_pyramid(img, 1)
        self.assertEqual(len(pyr), 1)
        self.assertIs(pyr[0], img)

    def test_sizes(self):
        """128 x 128 with 3 levels gives 32, 64, 128."""
        pyr = build_pyramid(GrayImage.filled(128, 128, 0.3), 3)
        self.assertEqual([(p.w, p.h) for p in pyr], [(32, 32), (64, 64), (128, 128)])

    def test_constant_image(self):
        """A constant image stays constant at every level."""
        for level in build_pyramid(GrayImage.filled(40, 24, 0.25), 3):
            np.testing.assert_allclose(level.data, 0.25)

    def test_box_filter(self):
        """Each coarse pixel is the mean of its 2 x 2 block; odd edges are dropped."""
        data = np.arange(15, dtype=np.float64).reshape(3, 5) / 14.0
        out = downsample(GrayImage(data))
        self.assertEqual(out.data.shape, (1, 2))
        self.assertAlmostEqual(out.data[0, 0], (0 + 1 + 5 + 6) / 4 / 14.0, places=12)
        self.assertAlmostEqual(out.data[0, 1], (2 + 3 + 7 + 8) / 4 / 14.0, places=12)

    def test_too_deep(self):
        """A 4 px image cannot hold 4 levels."""
        with self.assertRaises(PyramidError):
            build_pyramid(GrayImage.filled(4, 4, 0.0), 4)


class TestPyramidSchedule(unittest.TestCase):
    """Test PyramidSchedule."""

    def test_build(self):
        """Three levels from K = L = 3 give lattices 3, 5, 9."""
        sched = PyramidSchedule.build(128, 96, levels=3, base_k=3, base_l=3, generations=10, population=6)
        self.assertEqual([(lv.k, lv.l) for lv in sched.levels], [(3, 3), (5, 5), (9, 9)])
        self.assertEqual([(lv.image_w, lv.image_h) for lv in sched.levels], [(32, 24), (64, 48), (128, 96)])
        self.assertEqual(sched.levels[-1].lattice_spec().grid_shape, (11, 11))

    def test_rejects_bad_progression(self):
        """Levels must follow 2a - 1."""
        levels = [
            LevelSpec(image_w=16, image_h=16, k=3, l=3, generations=1, population=2),
            LevelSpec(image_w=32, image_h=32, k=6, l=5, generations=1, population=2),
        ]
        with self.assertRaises(ValidationError):
            PyramidSchedule(levels=levels, base_k=3, base_l=3)

    def test_rejects_empty(self):
        """At least one level."""
        with self.assertRaises(ValidationError):
            PyramidSchedule(levels=[], base_k=3, base_l=3)

    def test_too_small_image(self):
        """Depth is checked against the image size."""
        with self.assertRaises(PyramidError):
            PyramidSchedule.build(6, 6, levels=4)


class TestInherit(unittest.TestCase):
    """Test inherit."""

    coarse_spec = LatticeSpec(image_w=16, image_h=16, k=3, l=3)
    fine_spec = LatticeSpec(image_w=32, image_h=32, k=5, l=5)

    def test_zero(self):
        """Zero coarse lattice -> zero fine baseline."""
        out = inherit(ControlLattice.zeros(self.coarse_spec), (16, 16), self.fine_spec)
        self.assertFalse(out.displacements.any())

    def test_constant_doubles(self):
        """Constant c -> constant 2c."""
        out = inherit(ControlLattice.constant(self.coarse_spec, (0.75, -1.25)), (16, 16), self.fine_spec)
        np.testing.assert_allclose(out.vectors(), np.tile([1.5, -2.5], (self.fine_spec.n_nodes, 1)), atol=1e-12)

    def test_coinciding_nodes(self):
        """A fine node on a coarse node position gets twice the coarse field there."""
        coarse = RegistrationFixtures.random_lattice(self.coarse_spec, seed=12)
        out = inherit(coarse, (16, 16), self.fine_spec)
        # fine node (2, 2) sits at (16, 16) fine px == (8, 8) coarse px == coarse node (1, 1)
        expected = 2.0 * displacement_at(coarse, np.array([8.0]), np.array([8.0]))[0]
        np.testing.assert_allclose(out.displacements[3, 3], expected, atol=1e-9)

    def test_spec_mismatch(self):
        """Fine lattice and image sizes must refine the coarse ones."""
        coarse = ControlLattice.zeros(self.coarse_spec)
        with self.assertRaises(PyramidError):
            inherit(coarse, (16, 16), LatticeSpec(image_w=32, image_h=32, k=6, l=5))
        with self.assertRaises(PyramidError):
            inherit(coarse, (16, 16), LatticeSpec(image_w=64, image_h=32, k=5, l=5))
        with self.assertRaises(PyramidError):
            inherit(coarse, (8, 8), self.fine_spec)


class TestRunCoarseToFine(unittest.TestCase):
    """Test run_coarse_to_fine."""

    def test_lattice_sizes_per_level(self):
        """Three levels produce 3, 5 and 9 point lattices and one log per level."""
        img = RegistrationFixtures.texture(size=32)
        sched = PyramidSchedule.build(32, 32, levels=3, generations=2, population=4)
        result = run_coarse_to_fine(img, img, sched, small_ga(4), seed=1)
        self.assertEqual([(lv.spec.k, lv.spec.l) for lv in result.levels], [(3, 3), (5, 5), (9, 9)])
        self.assertEqual([len(lv.log) for lv in result.levels], [2, 2, 2])
        self.assertEqual(result.lattice.spec, sched.levels[-1].lattice_spec())

    def test_zero_generations_is_pure_inheritance(self):
        """With no generations every level keeps exactly the inherited lattice."""
        img = RegistrationFixtures.texture(size=16)
        sched = PyramidSchedule.build(16, 16, levels=2, generations=0, population=3)
        result = run_coarse_to_fine(img, img, sched, small_ga(3), seed=0)
        self.assertTrue(all(lv.log == [] for lv in result.levels))
        self.assertEqual(result.lattice.max_norm(), 0.0)
        self.assertAlmostEqual(result.elite_sad, 0.0, places=9)

    def test_deterministic(self):
        """The same master seed reproduces the run."""
        src = RegistrationFixtures.texture(size=16, seed=3)
        tgt = RegistrationFixtures.texture(size=16, seed=4)
        sched = PyramidSchedule.build(16, 16, levels=2, generations=3, population=5)
        a = run_coarse_to_fine(src, tgt, sched, small_ga(5), seed=42)
        b = run_coarse_to_fine(src, tgt, sched, small_ga(5), seed=42)
        np.testing.assert_array_equal(a.lattice.displacements, b.lattice.displacements)
        self.assertEqual([lv.log for lv in a.levels], [lv.log for lv in b.levels])

    def test_identity_stays_within_step(self):
        """source == target on one level keeps every node within one quantization step."""
        img = RegistrationFixtures.texture(size=16)
        sched = PyramidSchedule.build(16, 16, levels=1, base_k=2, base_l=2, generations=30, population=10)
        ga = small_ga(10)
        result = run_coarse_to_fine(img, img, sched, ga, seed=5)
        self.assertLessEqual(result.lattice.max_norm(), ga.encoding.step)

    def test_finest_beats_every_upsampled_level(self):
        """The finest elite SAD is at most that of any coarser result upsampled to the finest level."""
        img = RegistrationFixtures.texture(size=32)
        sched = PyramidSchedule.build(32, 32, levels=3, generations=10, population=8)
        for seed in range(4):
            case = generate_case(seed, img, gt_k=3, gt_l=3, gt_radius=3.0)
            result = run_coarse_to_fine(case.source, case.target, sched, small_ga(8), seed=seed)
            finest = sad(warp(case.source, result.lattice), case.target)
            self.assertAlmostEqual(finest, result.elite_sad, places=6)
            for level in range(len(result.levels) - 1):
                upsampled = sad(warp(case.source, upsampled_to_finest(result, level)), case.target)
                self.assertLessEqual(result.elite_sad, upsampled + 1e-6, f"seed {seed}, level {level}")

    def test_level_baseline_is_best_upsampled_result(self):
        """Each level starts from the lowest-SAD coarser result brought to its size."""
        img = RegistrationFixtures.texture(size=32)
        case = generate_case(1, img, gt_k=3, gt_l=3, gt_radius=3.0)
        sched = PyramidSchedule.build(32, 32, levels=3, generations=6, population=6)
        result = run_coarse_to_fine(case.source, case.target, sched, small_ga(6), seed=1)
        src2, tgt2 = build_pyramid(case.source, 3)[2], build_pyramid(case.target, 3)[2]
        candidates = [upsampled_to_finest(result, 1), upsampled_to_finest(result, 0)]
        expected = best_baseline(candidates, src2, tgt2)
        np.testing.assert_array_equal(result.levels[2].baseline.displacements, expected.displacements)
        self.assertLessEqual(result.levels[2].elite_sad, sad(warp(src2, expected), tgt2) + 1e-6)

    def test_size_mismatch(self):
        """Source and target must match, and the schedule must end at their size."""
        sched = PyramidSchedule.build(16, 16, levels=1, generations=1, population=2)
        with self.assertRaises(ImageDimensionError):
            run_coarse_to_fine(GrayImage.filled(16, 16, 0.0), GrayImage.filled(16, 8, 0.0), sched, small_ga(2))
        with self.assertRaises(PyramidError):
            run_coarse_to_fine(GrayImage.filled(8, 8, 0.0), GrayImage.filled(8, 8, 0.0), sched, small_ga(2))

    def test_recorder_receives_levels(self):
        """A recorder gets one call per level."""
        saved = []

        class Recorder:
            def save_level(self, result):
                saved.append(result.level)

        img = RegistrationFixtures.texture(size=16)
        sched = PyramidSchedule.build(16, 16, levels=2, generations=1, population=2)
        run_coarse_to_fine(img, img, sched, small_ga(2), recorder=Recorder())
        self.assertEqual(saved, [0, 1])

    def test_progress_messages(self):
        """on_progress gets a start and a done message per level."""
        messages = []
        img = RegistrationFixtures.texture(size=16)
        sched = PyramidSchedule.build(16, 16, levels=1, generations=1, population=2)
        run_coarse_to_fine(img, img, sched, small_ga(2), on_progress=lambda m, c: messages.append(c))
        self.assertEqual(messages, ["yellow", "green"])

    @unittest.skipUnless(SLOW, "set PBGA_SLOW_TESTS=1 to run")
    def test_identity_three_levels_across_seeds(self):
        """source == target over three levels stays within one step in 9 of 10 seeds."""
        img = RegistrationFixtures.texture(size=32)
        sched = PyramidSchedule.build(32, 32, levels=3, generations=100, population=20)
        ga = small_ga(20)
        hits = sum(
            run_coarse_to_fine(img, img, sched, ga, seed=seed).lattice.max_norm() <= ga.encoding.step
            for seed in range(10)
        )
        self.assertGreaterEqual(hits, 9)


if __name__ == "__main__":
    unittest.main()
