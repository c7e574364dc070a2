import logging
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np
from PIL import Image, ImageDraw

from core.errors import ArtifactIOError
from core.ffd import ControlLattice, displacement_at
from core.fitness import GrayImage

logger = logging.getLogger(__name__)

Colour = Tuple[int, int, int]


class OverlayRenderer:
    """Draws landmark correspondences on an upscaled copy of the target image."""

    GT_COLOUR: Colour = (0, 200, 0)
    ESTIMATE_COLOUR: Colour = (220, 30, 30)
    LINK_COLOUR: Colour = (255, 210, 0)

    def __init__(self, scale: int = 4, marker_radius: int = 3):
        self.scale = max(1, int(scale))
        self.marker_radius = marker_radius


    def correspondences(self, lat: ControlLattice, landmarks: np.ndarray) -> np.ndarray:
        """T(p) for every landmark; points outside the domain are clamped onto it."""
        pts = np.asarray(landmarks, dtype=np.float64).reshape(-1, 2)
        if pts.size == 0:
            return pts
        return pts + displacement_at(lat, pts[:, 0], pts[:, 1], clamp=True)


    def _marker(self, draw: ImageDraw.ImageDraw, p: Sequence[float], colour: Colour) -> None:
        x, y = (float(p[0]) + 0.5) * self.scale, (float(p[1]) + 0.5) * self.scale
        r = self.marker_radius
        draw.ellipse((x - r, y - r, x + r, y + r), outline=colour, width=2)


    def render(
        self,
        target: GrayImage,
        landmarks: np.ndarray,
        estimated: ControlLattice,
        gt: ControlLattice,
        path: Path,
    ) -> Path:
        """
        Writes a PNG with ground-truth correspondences in green, estimated ones
        in red, and a yellow segment joining the two for every landmark.
        """
        rgb = np.repeat(target.to_uint8()[..., None], 3, axis=-1)
        img = Image.fromarray(rgb).resize(
            (target.w * self.scale, target.h * self.scale), resample=Image.NEAREST
        )
        draw = ImageDraw.Draw(img)

        truth = self.correspondences(gt, landmarks)
        guess = self.correspondences(estimated, landmarks)
        for t, g in zip(truth, guess):
            draw.line(
                [((t[0] + 0.5) * self.scale, (t[1] + 0.5) * self.scale),
                 ((g[0] + 0.5) * self.scale, (g[1] + 0.5) * self.scale)],
                fill=self.LINK_COLOUR,
                width=1,
            )
            self._marker(draw, t, self.GT_COLOUR)
            self._marker(draw, g, self.ESTIMATE_COLOUR)

        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            img.save(path, format="PNG")
        except OSError as e:
            raise ArtifactIOError(f"Cannot write overlay {path}: {e}") from e
        logger.debug(f"Overlay written: {path}")
        return path
