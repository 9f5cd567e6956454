from __future__ import annotations

import enum
from dataclasses import dataclass

from ..model import BBox


class LayoutClass(str, enum.Enum):
    PLAIN_TEXT = "plain_text"
    TITLE = "title"
    FIGURE = "figure"
    FIGURE_CAPTION = "figure_caption"
    TABLE = "table"
    TABLE_CAPTION = "table_caption"
    TABLE_FOOTNOTE = "table_footnote"
    ISOLATE_FORMULA = "isolate_formula"
    FORMULA_CAPTION = "formula_caption"
    ABANDON = "abandon"


NON_TRANSLATABLE = frozenset(
    {LayoutClass.FIGURE, LayoutClass.TABLE, LayoutClass.ISOLATE_FORMULA, LayoutClass.ABANDON}
)


@dataclass(frozen=True)
class LayoutBox:
    cls: LayoutClass
    bbox: BBox
    confidence: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class DetectorConfig:
    model_path: str | None = None
    input_size: int = 1024
    confidence_threshold: float = 0.25
    nms_iou_threshold: float = 0.45

    def __post_init__(self) -> None:
        if self.input_size <= 0:
            raise ValueError("input_size must be positive")
        # 1.0 is accepted so callers can switch detection off entirely
        for name in ("confidence_threshold", "nms_iou_threshold"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
