"""Page rasterization seam for the model-based detector.

The detector only needs an RGB bitmap of the page. ``BoxRasterizer`` paints
each text run's bounding box as a solid block, which is enough for hermetic
tests and for documents whose text layer is reliable. ``CommandRasterizer``
delegates to an external tool such as ``pdftoppm`` when one is installed.
"""
from __future__ import annotations

import io
import logging
import shutil
import subprocess
from typing import Protocol, Sequence

from ..model import BBox, TextRun

logger = logging.getLogger(__name__)

DEFAULT_DPI = 72.0


class RasterError(RuntimeError):
    pass


class Rasterizer(Protocol):
    def render(self, pdf_bytes: bytes, page_index: int, media_box: BBox, runs: Sequence[TextRun]): ...


class BoxRasterizer:
    def __init__(self, dpi: float = DEFAULT_DPI) -> None:
        self.dpi = dpi

    def render(self, pdf_bytes: bytes, page_index: int, media_box: BBox, runs: Sequence[TextRun]):
        return render_runs(runs, media_box, self.dpi)


def render_runs(runs: Sequence[TextRun], media_box: BBox, dpi: float = DEFAULT_DPI):
    """White page with every run's bbox filled black."""
    from PIL import Image, ImageDraw

    scale = dpi / 72.0
    w = max(1, round(media_box.width * scale))
    h = max(1, round(media_box.height * scale))
    img = Image.new("RGB", (w, h), (255, 255, 255))
    draw = ImageDraw.Draw(img)
    for r in runs:
        b = r.bbox
        x0 = (b.x0 - media_box.x0) * scale
        x1 = (b.x1 - media_box.x0) * scale
        y0 = (media_box.y1 - b.y1) * scale
        y1 = (media_box.y1 - b.y0) * scale
        draw.rectangle([x0, y0, max(x0, x1 - 1), max(y0, y1 - 1)], fill=(0, 0, 0))
    return img


class CommandRasterizer:
    """Runs ``pdftoppm`` (or a compatible tool) on the whole document."""

    def __init__(self, command: str = "pdftoppm", dpi: float = 100.0, timeout: float = 60.0) -> None:
        self.command = command
        self.dpi = dpi
        self.timeout = timeout

    @staticmethod
    def available(command: str = "pdftoppm") -> bool:
        return shutil.which(command) is not None

    def render(self, pdf_bytes: bytes, page_index: int, media_box: BBox, runs: Sequence[TextRun]):
        from PIL import Image

        page = str(page_index + 1)
        args = [self.command, "-r", str(self.dpi), "-f", page, "-l", page, "-png", "-", "-"]
        try:
            proc = subprocess.run(args, input=pdf_bytes, capture_output=True, timeout=self.timeout, check=True)
        except (OSError, subprocess.SubprocessError) as exc:
            raise RasterError(f"{self.command} failed: {exc}") from exc
        return Image.open(io.BytesIO(proc.stdout)).convert("RGB")


def default_rasterizer() -> Rasterizer:
    if CommandRasterizer.available():
        return CommandRasterizer()
    logger.info("no external rasterizer found; painting text boxes instead")
    return BoxRasterizer()
