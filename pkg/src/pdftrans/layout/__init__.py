from .assign import assign_runs
from .model import (
    InferenceError,
    ModelLoadError,
    OnnxLayoutDetector,
    detect_layout_model,
)
from .raster import BoxRasterizer, CommandRasterizer, render_runs
from .rules import detect_layout_rules
from .types import NON_TRANSLATABLE, DetectorConfig, LayoutBox, LayoutClass

__all__ = [
    "BoxRasterizer",
    "CommandRasterizer",
    "DetectorConfig",
    "InferenceError",
    "LayoutBox",
    "LayoutClass",
    "ModelLoadError",
    "NON_TRANSLATABLE",
    "OnnxLayoutDetector",
    "assign_runs",
    "detect_layout_model",
    "detect_layout_rules",
    "render_runs",
]
