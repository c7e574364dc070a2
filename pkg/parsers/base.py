from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any

from core.errors import ArtifactIOError


class ArtifactParser(ABC):
    """
    One file format: how to load it into a domain object and write it back.

    Subclasses must go through the safe read helpers so that every format
    shares the size limit and the error type.
    """

    # HARD LIMIT: 64MB (a 4096x4096 PGM is 16MB).
    MAX_FILE_SIZE_BYTES = 64 * 1024 * 1024
    EXTENSIONS: tuple = ()

    @abstractmethod
    def read(self, file_path: Path) -> Any:
        """Loads the artifact at `file_path`."""
        pass

    @abstractmethod
    def write(self, obj: Any, file_path: Path) -> Path:
        """Serializes `obj` to `file_path` and returns the path written."""
        pass

    def _check_size(self, file_path: Path) -> None:
        file_path = Path(file_path)
        if not file_path.is_file():
            raise ArtifactIOError(f"File not found: {file_path}")
        size = file_path.stat().st_size
        if size > self.MAX_FILE_SIZE_BYTES:
            raise ArtifactIOError(f"File too large ({size} bytes): {file_path}")

    def _read_text_safely(self, file_path: Path) -> str:
        """Helper to read text files respecting the size limit."""
        self._check_size(file_path)
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                return f.read()
        except (OSError, UnicodeDecodeError) as e:
            raise ArtifactIOError(f"Cannot read {file_path}: {e}") from e

    def _write_text(self, text: str, file_path: Path) -> Path:
        file_path = Path(file_path)
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            # newline="" keeps "\n" on every platform, so outputs compare byte for byte
            with open(file_path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as e:
            raise ArtifactIOError(f"Cannot write {file_path}: {e}") from e
        return file_path
