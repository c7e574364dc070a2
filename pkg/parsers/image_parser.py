import logging
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from core.errors import ArtifactIOError
from core.fitness import GrayImage
from .base import ArtifactParser

logger = logging.getLogger(__name__)


class ImageParser(ArtifactParser):
    """8-bit grayscale PNG / PGM. Colour inputs are reduced with Rec. 601 luma."""

    EXTENSIONS = (".png", ".pgm")
    _FORMATS = {".png": "PNG", ".pgm": "PPM"}

    def read(self, file_path: Path) -> GrayImage:
        file_path = Path(file_path)
        self._check_size(file_path)
        try:
            with Image.open(file_path) as img:
                img.load()
                if img.mode in ("I", "I;16", "I;16B"):
                    # 16-bit PGM
                    pixels = np.asarray(img, dtype=np.float64) / 65535.0
                    return GrayImage(np.clip(pixels, 0.0, 1.0))
                if img.mode != "L":
                    logger.debug(f"Converting {file_path.name} from {img.mode} to grayscale")
                    img = img.convert("L")
                return GrayImage.from_uint8(np.asarray(img, dtype=np.uint8))
        except (OSError, UnidentifiedImageError) as e:
            raise ArtifactIOError(f"Cannot load image {file_path}: {e}") from e

    def write(self, obj: GrayImage, file_path: Path) -> Path:
        file_path = Path(file_path)
        fmt = self._FORMATS.get(file_path.suffix.lower())
        if fmt is None:
            raise ArtifactIOError(f"Unsupported image extension '{file_path.suffix}' (use .png or .pgm)")
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            Image.fromarray(obj.to_uint8()).save(file_path, format=fmt)
        except OSError as e:
            raise ArtifactIOError(f"Cannot write image {file_path}: {e}") from e
        return file_path
