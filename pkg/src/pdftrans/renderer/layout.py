"""Greedy line breaking with shrink-to-fit inside a paragraph box.

Protected groups (formulas) keep their original positions. They are passed
in as obstacles: a line that vertically overlaps one is split into the free
horizontal intervals around it, so translated text flows past the formula.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from ..model import BBox
from ..segmenter import Segment, _is_cjk
from .fonts import TargetFont

logger = logging.getLogger(__name__)

LINE_HEIGHT = 1.2
SHRINK_STEP = 0.95
SHRINK_FLOOR = 0.6
# how far the last line's descent may hang below the box
BOTTOM_SLACK = 0.5
# horizontal clearance kept around an obstacle, in em of the current size
OBSTACLE_PAD = 0.25
# free intervals narrower than this (em) are not used
MIN_INTERVAL = 1.5


@dataclass(frozen=True)
class PositionedLine:
    text: str
    x: float
    y: float
    size: float
    width: float

    def bbox(self, font: TargetFont) -> BBox:
        return BBox(self.x, self.y + font.descent * self.size, self.x + self.width, self.y + font.ascent * self.size)


@dataclass
class FitReport:
    status: str  # "exact" | "shrunk" | "overflow"
    size: float
    lines: int = 0
    overflow: bool = False
    missing_glyphs: int = 0
    rtl_unshaped: bool = False
    warnings: list[str] = field(default_factory=list)


def size_candidates(base: float) -> list[float]:
    sizes = []
    k = 0
    while True:
        s = base * SHRINK_STEP**k
        if s < base * SHRINK_FLOOR:
            break
        sizes.append(s)
        k += 1
    if sizes[-1] > base * SHRINK_FLOOR:
        sizes.append(base * SHRINK_FLOOR)
    return sizes


def tokenize(segments: Sequence[Segment | str]) -> list[str]:
    """Split text into unbreakable tokens.

    A token ends after a space (the space stays attached), after a CJK
    character, and at every protected segment.
    """
    tokens: list[str] = []
    cur: list[str] = []

    def flush() -> None:
        if cur:
            tokens.append("".join(cur))
            cur.clear()

    for seg in segments:
        if isinstance(seg, str):
            text = seg
        elif seg.protected:
            flush()
            continue
        else:
            text = seg.text
        for ch in text:
            if ch in "\r\n\t":
                ch = " "
            if ch == " ":
                if cur:
                    cur.append(ch)
                    flush()
                elif tokens and not tokens[-1].endswith(" "):
                    tokens[-1] += " "
                # leading and repeated spaces are dropped
            elif _is_cjk(ch):
                cur.append(ch)
                flush()
            else:
                cur.append(ch)
    flush()
    return tokens


def _free_intervals(box: BBox, y_lo: float, y_hi: float, obstacles: Sequence[BBox], pad: float) -> list[tuple[float, float]]:
    intervals = [(box.x0, box.x1)]
    for ob in obstacles:
        if ob.y1 <= y_lo or ob.y0 >= y_hi:
            continue
        lo, hi = ob.x0 - pad, ob.x1 + pad
        nxt = []
        for a, b in intervals:
            if hi <= a or lo >= b:
                nxt.append((a, b))
                continue
            if lo > a:
                nxt.append((a, lo))
            if hi < b:
                nxt.append((hi, b))
        intervals = nxt
    return intervals


def _break_token(token: str, font: TargetFont, size: float, avail: float) -> tuple[str, str]:
    """Longest prefix of ``token`` (at least one char) that fits ``avail``."""
    width = 0.0
    for i, ch in enumerate(token):
        width += font.char_width(ch) * size
        if width > avail + 1e-9:
            return token[: max(i, 1)], token[max(i, 1):]
    return token, ""


def _try_layout(
    tokens: list[str],
    box: BBox,
    font: TargetFont,
    size: float,
    obstacles: Sequence[BBox],
    allow_overflow: bool,
) -> list[PositionedLine] | None:
    """Place all tokens at ``size``; None if they do not fit (unless overflowing)."""
    lines: list[PositionedLine] = []
    queue = list(tokens)
    pitch = LINE_HEIGHT * size
    y = box.y1 - font.ascent * size
    pad = OBSTACLE_PAD * size
    min_width = MIN_INTERVAL * size
    guard = 0
    while queue:
        guard += 1
        if guard > 100000:
            return None
        bottom = y + font.descent * size
        below = bottom < box.y0 - BOTTOM_SLACK
        if below and not allow_overflow:
            return None
        if below:
            intervals = [(box.x0, box.x1)]
        else:
            intervals = _free_intervals(box, bottom, y + font.ascent * size, obstacles, pad)
        widest = max((b - a for a, b in intervals), default=0.0)
        for a, b in intervals:
            avail = b - a
            if not queue:
                break
            if avail < min_width and avail < widest:
                continue
            parts: list[str] = []
            width = 0.0
            while queue:
                tok = queue[0]
                core = tok.rstrip(" ")
                w_core = font.text_width(core, size)
                if width + w_core <= avail + 1e-9:
                    parts.append(tok)
                    width += font.text_width(tok, size)
                    queue.pop(0)
                    continue
                if not parts and avail >= widest - 1e-9:
                    if font.char_width(core[:1]) * size > avail + 1e-9:
                        if widest < box.width - 1e-9:
                            # an obstacle leaves no room for even one glyph: try the next row
                            break
                        if not allow_overflow:
                            return None
                    # a single token wider than the line: break inside it
                    head, tail = _break_token(core, font, size, avail)
                    parts.append(head)
                    width += font.text_width(head, size)
                    queue[0] = tail + tok[len(core):] if tail else tok[len(core):]
                    if not queue[0].strip():
                        queue.pop(0)
                break
            text = "".join(parts).rstrip(" ")
            if text:
                lines.append(PositionedLine(text, a, y, size, font.text_width(text, size)))
        y -= pitch
    return lines


def layout_text(
    segments: Sequence[Segment | str],
    box: BBox,
    font: TargetFont,
    base_size: float,
    obstacles: Sequence[BBox] = (),
    rtl: bool = False,
) -> tuple[list[PositionedLine], FitReport]:
    """Fill ``box`` with the text segments, shrinking the size if needed.

    Tries base_size * 0.95**k down to 0.6 * base_size; if even that does not
    fit, lays out at the floor size past the bottom and flags overflow.
    """
    if base_size <= 0:
        raise ValueError("base_size must be positive")
    if box.width <= 0 or box.height <= 0:
        raise ValueError("degenerate box")
    tokens = tokenize(segments)
    text = "".join(tokens)
    missing = len(font.missing(text))
    report = FitReport("exact", base_size, missing_glyphs=missing, rtl_unshaped=rtl)
    if missing:
        report.warnings.append(f"{missing} characters have no glyph in {font.name}")
    if not tokens:
        return [], report
    sizes = size_candidates(base_size)
    for k, size in enumerate(sizes):
        lines = _try_layout(tokens, box, font, size, obstacles, allow_overflow=False)
        if lines is not None:
            report.status = "exact" if k == 0 else "shrunk"
            report.size = size
            report.lines = len(lines)
            return lines, report
    size = sizes[-1]
    lines = _try_layout(tokens, box, font, size, obstacles, allow_overflow=True) or []
    report.status = "overflow"
    report.overflow = True
    report.size = size
    report.lines = len(lines)
    msg = f"text overflows its box at {size:.2f}pt ({len(lines)} lines)"
    logger.warning(msg)
    report.warnings.append(msg)
    return lines, report
