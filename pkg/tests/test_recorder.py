import json
import tempfile
import unittest
from pathlib import Path

from core.ffd import ControlLattice
from core.ga import GenerationRecord
from core.pyramid import LevelResult
from core.recorder import LevelRecorder
from parsers import table_parser
from tests.fixtures import RegistrationFixtures


def level_result(level: int, elite_sad: float, generations: int = 2) -> LevelResult:
    spec = RegistrationFixtures.spec()
    log = [GenerationRecord(g, elite_sad + 1 - g, elite_sad + 2, 1.0, 0.5) for g in range(generations)]
    return LevelResult(
        level=level,
        spec=spec,
        baseline=ControlLattice.zeros(spec),
        lattice=ControlLattice.constant(spec, (0.3, 0.4)),
        elite_sad=elite_sad,
        log=log,
        seconds=0.25,
    )


class TestLevelRecorder(unittest.TestCase):
    """Test LevelRecorder."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.out = Path(self._tmp.name) / "levels"

    def tearDown(self):
        self._tmp.cleanup()

    def test_save_level_writes_files(self):
        """A saved level produces its CSV log and JSON result."""
        recorder = LevelRecorder(self.out, label="test")
        recorder.save_level(level_result(0, 12.0))
        self.assertEqual(len(table_parser().read_log(recorder.log_path(0))), 2)
        data = json.loads(recorder.result_path(0).read_text(encoding="utf-8"))
        self.assertEqual(data["elite_sad"], 12.0)
        self.assertAlmostEqual(data["max_node_norm"], 0.5)
        self.assertEqual((data["k"], data["l"]), (3, 3))

    def test_result_reloaded_from_disk(self):
        """A fresh recorder finds results persisted by an earlier one."""
        LevelRecorder(self.out).save_level(level_result(1, 7.5))
        self.assertEqual(LevelRecorder(self.out).get_level_result(1)["elite_sad"], 7.5)
        self.assertIsNone(LevelRecorder(self.out).get_level_result(4))

    def test_summary(self):
        """The summary reports the finest level's elite and total time."""
        recorder = LevelRecorder(self.out, label="run")
        recorder.save_level(level_result(0, 20.0))
        recorder.save_level(level_result(1, 9.0))
        summary = recorder.get_summary()
        self.assertEqual(summary["completed_levels"], 2)
        self.assertEqual(summary["final_elite_sad"], 9.0)
        self.assertEqual(summary["total_seconds"], 0.5)

    def test_empty_log_level(self):
        """Zero-generation levels still record a result."""
        recorder = LevelRecorder(self.out)
        recorder.save_level(level_result(0, 3.0, generations=0))
        self.assertIsNone(recorder.get_level_result(0)["first_best_sad"])
        self.assertEqual(table_parser().read_log(recorder.log_path(0)), [])


if __name__ == "__main__":
    unittest.main()
