from .emit import EmitError, PageCountMismatch, PageRender, ParagraphRender, emit_dual, emit_pdf
from .fonts import (
    FontNotFound,
    FontSubset,
    FontSubsetError,
    TargetFont,
    download_remote_fonts,
    select_font,
    subset_font,
)
from .layout import FitReport, PositionedLine, layout_text

__all__ = [
    "EmitError",
    "FitReport",
    "FontNotFound",
    "FontSubset",
    "FontSubsetError",
    "PageCountMismatch",
    "PageRender",
    "ParagraphRender",
    "PositionedLine",
    "TargetFont",
    "download_remote_fonts",
    "emit_dual",
    "emit_pdf",
    "layout_text",
    "select_font",
    "subset_font",
]
