import csv
import io
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

from core.errors import ArtifactIOError
from core.ga import LOG_COLUMNS, GenerationRecord
from .base import ArtifactParser

LANDMARK_COLUMNS = ("x", "y")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class TableParser(ArtifactParser):
    """Header-first CSV tables (generation logs, landmarks, benchmark reports)."""

    EXTENSIONS = (".csv",)

    def dumps(self, fieldnames: Sequence[str], rows: Sequence[Dict[str, Any]]) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in fieldnames})
        return buf.getvalue()

    def read(self, file_path: Path) -> List[Dict[str, str]]:
        text = self._read_text_safely(file_path)
        reader = csv.DictReader(io.StringIO(text))
        if not reader.fieldnames:
            raise ArtifactIOError(f"{file_path} has no header row")
        return list(reader)

    def write(self, obj: Dict[str, Any], file_path: Path) -> Path:
        """`obj` is {"fieldnames": [...], "rows": [{...}, ...]}."""
        return self._write_text(self.dumps(obj["fieldnames"], obj["rows"]), file_path)

    # --- Typed helpers ---

    def write_log(self, log: Sequence[GenerationRecord], file_path: Path) -> Path:
        return self.write({"fieldnames": LOG_COLUMNS, "rows": [asdict(r) for r in log]}, file_path)

    def read_log(self, file_path: Path) -> List[GenerationRecord]:
        rows = self.read(file_path)
        try:
            return [
                GenerationRecord(
                    generation=int(r["generation"]),
                    best_sad=float(r["best_sad"]),
                    mean_sad=float(r["mean_sad"]),
                    p_ann=float(r["p_ann"]),
                    mean_hamming=float(r["mean_hamming"]),
                )
                for r in rows
            ]
        except (KeyError, TypeError, ValueError) as e:
            raise ArtifactIOError(f"Malformed generation log {file_path}: {e}") from e

    def write_landmarks(self, points: np.ndarray, file_path: Path) -> Path:
        rows = [{"x": float(x), "y": float(y)} for x, y in np.asarray(points, dtype=np.float64).reshape(-1, 2)]
        return self.write({"fieldnames": LANDMARK_COLUMNS, "rows": rows}, file_path)

    def read_landmarks(self, file_path: Path) -> np.ndarray:
        rows = self.read(file_path)
        try:
            pts = [(float(r["x"]), float(r["y"])) for r in rows]
        except (KeyError, TypeError, ValueError) as e:
            raise ArtifactIOError(f"Landmark file {file_path} needs numeric x,y columns: {e}") from e
        return np.array(pts, dtype=np.float64).reshape(-1, 2)
