import re
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from pydantic import ValidationError

from core.errors import ConfigError
from core.schemas import RunConfig
from .base import ArtifactParser

# Capture 'KEY = VALUE'
_KEY_VALUE = re.compile(r"^\s*([A-Za-z0-9_.-]+)\s*=\s*(.*?)\s*$")
_NULLS = {"", "none", "null"}


def _coerce(raw: str) -> Optional[str]:
    value = raw.strip().strip("\"'")
    return None if value.lower() in _NULLS else value


def _format_validation(err: ValidationError) -> str:
    parts = []
    for item in err.errors():
        field = ".".join(str(p) for p in item.get("loc", ())) or "config"
        parts.append(f"{field}: {item.get('msg', 'invalid value')}")
    return "; ".join(parts)


class ConfigParser(ArtifactParser):
    """Plain-text `key = value` run configuration; '#' starts a comment."""

    EXTENSIONS = (".conf", ".cfg", ".ini", ".txt")

    def parse_pairs(self, text: str, source: str = "<config>") -> Dict[str, Any]:
        values: Dict[str, Any] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0]
            if not line.strip():
                continue
            # [section] headers are tolerated and ignored
            if line.strip().startswith("[") and line.strip().endswith("]"):
                continue
            match = _KEY_VALUE.match(line)
            if not match:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value', got '{line.strip()}'")
            key = match.group(1).replace("-", "_").lower()
            if key not in RunConfig.model_fields:
                raise ConfigError(f"{source}:{lineno}: unknown key '{match.group(1)}'")
            values[key] = _coerce(match.group(2))
        return values

    def parse_overrides(self, overrides: Iterable[str]) -> Dict[str, Any]:
        """`--set key=value` arguments."""
        return self.parse_pairs("\n".join(overrides), source="--set")

    def build(self, *layers: Dict[str, Any]) -> RunConfig:
        """Later layers win; the merged dict is validated once."""
        merged: Dict[str, Any] = {}
        for layer in layers:
            merged.update(layer)
        try:
            return RunConfig(**merged)
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {_format_validation(e)}") from e

    def read(self, file_path: Path) -> RunConfig:
        file_path = Path(file_path)
        return self.build(self.parse_pairs(self._read_text_safely(file_path), source=file_path.name))

    def write(self, obj: RunConfig, file_path: Path) -> Path:
        lines = [f"{key} = {'none' if value is None else value}" for key, value in obj.model_dump().items()]
        return self._write_text("\n".join(lines) + "\n", file_path)


def load_config(
    config_path: Optional[Path] = None,
    overrides: Iterable[str] = (),
    **flags: Any,
) -> RunConfig:
    """
    Defaults < config file < `--set` overrides < dedicated flags (None flags are skipped).
    """
    parser = ConfigParser()
    from_file: Dict[str, Any] = {}
    if config_path is not None:
        from_file = parser.parse_pairs(parser._read_text_safely(config_path), source=Path(config_path).name)
    return parser.build(from_file, parser.parse_overrides(overrides), {k: v for k, v in flags.items() if v is not None})
