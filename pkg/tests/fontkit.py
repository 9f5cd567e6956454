"""Tiny TrueType fonts built on the fly with fontTools."""
from __future__ import annotations

from pathlib import Path

from fontTools.fontBuilder import FontBuilder
from fontTools.pens.ttGlyphPen import TTGlyphPen

ADVANCE = 500  # every glyph is half an em wide


def _box(width: int, height: int):
    pen = TTGlyphPen(None)
    pen.moveTo((50, 0))
    pen.lineTo((50, height))
    pen.lineTo((width - 50, height))
    pen.lineTo((width - 50, 0))
    pen.closePath()
    return pen.glyph()


def build_font(path: Path, codepoints, family: str = "Fixed") -> Path:
    """Write a glyf font mapping each codepoint to a box of advance 500/1000."""
    cps = sorted(set(codepoints))
    names = [".notdef"] + [f"g{cp:04X}" for cp in cps]
    fb = FontBuilder(1000, isTTF=True)
    fb.setupGlyphOrder(names)
    fb.setupCharacterMap({cp: f"g{cp:04X}" for cp in cps})
    fb.setupGlyf({n: _box(ADVANCE, 700) for n in names})
    fb.setupHorizontalMetrics({n: (ADVANCE, 50) for n in names})
    fb.setupHorizontalHeader(ascent=800, descent=-200)
    fb.setupNameTable({"familyName": family, "styleName": "Regular"})
    fb.setupOS2(sTypoAscender=800, sTypoDescender=-200, usWinAscent=800, usWinDescent=200)
    fb.setupPost()
    fb.save(str(path))
    return path


def ascii_font(directory: Path) -> Path:
    return build_font(directory / "fixed.ttf", range(0x20, 0x7F))


def large_font(directory: Path) -> Path:
    """ASCII plus 1000 ideographs."""
    return build_font(directory / "large.ttf", list(range(0x20, 0x7F)) + list(range(0x4E00, 0x4E00 + 1000)), "Large")
