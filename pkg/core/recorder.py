from datetime import datetime
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from core.errors import ArtifactIOError
from parsers import table_parser

logger = logging.getLogger(__name__)


class LevelRecorder:
    """
    Persists each pyramid level of a coarse-to-fine run.

    Every finished level produces `level_<n>_log.csv` (one row per generation)
    and `level_<n>_result.json` (lattice size, elite SAD, timing).
    """

    def __init__(self, out_dir: Path, label: str = "run"):
        """
        Args:
            out_dir: Directory receiving the level files (created if missing).
            label: Free-form run name stored in the summary.
        """
        self.out_dir = Path(out_dir)
        self.label = label
        self.started_at = datetime.now().isoformat()
        self.level_results: Dict[int, Dict[str, Any]] = {}
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ArtifactIOError(f"Cannot create output directory {self.out_dir}: {e}") from e


    def log_path(self, level: int) -> Path:
        return self.out_dir / f"level_{level}_log.csv"


    def result_path(self, level: int) -> Path:
        return self.out_dir / f"level_{level}_result.json"


    def save_level(self, result) -> None:
        """
        Save one finished level.

        Args:
            result: core.pyramid.LevelResult
        """
        spec = result.spec
        summary = {
            "level": result.level,
            "image_w": spec.image_w,
            "image_h": spec.image_h,
            "k": spec.k,
            "l": spec.l,
            "generations": len(result.log),
            "elite_sad": result.elite_sad,
            "first_best_sad": result.log[0].best_sad if result.log else None,
            "max_node_norm": result.lattice.max_norm(),
            "seconds": round(result.seconds, 3),
            "timestamp": datetime.now().isoformat(),
        }
        self.level_results[result.level] = summary
        table_parser().write_log(result.log, self.log_path(result.level))
        self._persist_level_result(result.level, summary)


    def get_level_result(self, level: int) -> Optional[Dict[str, Any]]:
        """In-memory result, falling back to the JSON file on disk."""
        if level in self.level_results:
            return self.level_results[level]
        return self._load_level_result(level)


    def get_summary(self) -> Dict[str, Any]:
        levels = sorted(self.level_results)
        return {
            "label": self.label,
            "started_at": self.started_at,
            "completed_levels": len(levels),
            "final_elite_sad": self.level_results[levels[-1]]["elite_sad"] if levels else None,
            "total_seconds": round(sum(r["seconds"] for r in self.level_results.values()), 3),
            "levels": {n: {"elite_sad": self.level_results[n]["elite_sad"]} for n in levels},
        }


    def _persist_level_result(self, level: int, summary: Dict[str, Any]) -> None:
        try:
            with open(self.result_path(level), "w", encoding="utf-8") as f:
                json.dump(summary, f, indent=2)
        except OSError as e:
            raise ArtifactIOError(f"Failed to persist level {level} result: {e}") from e


    def _load_level_result(self, level: int) -> Optional[Dict[str, Any]]:
        path = self.result_path(level)
        if not path.exists():
            return None
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Failed to load level {level} result: {e}")
            return None
