"""Model-free layout detection by recursive XY-cut over text runs."""
from __future__ import annotations

import statistics
from typing import Sequence

from ..model import BBox, TextRun, union_all
from .types import LayoutBox, LayoutClass

# whitespace needed for a cut, in multiples of the page's median metrics
ROW_GAP_FACTOR = 1.5
COLUMN_GAP_FACTOR = 3.0
MARGIN_BAND = 36.0
TITLE_SIZE_RATIO = 1.15


def _gaps(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Whitespace intervals between the merged projections."""
    intervals = sorted(intervals)
    gaps = []
    cur_end = intervals[0][1]
    for start, end in intervals[1:]:
        if start > cur_end:
            gaps.append((cur_end, start))
        cur_end = max(cur_end, end)
    return gaps


def _best_cut(items: list[BBox], row_gap: float, col_gap: float) -> tuple[str, float] | None:
    best: tuple[float, int, float] | None = None
    # axis order breaks width ties: columns first
    for axis_rank, (axis, threshold) in enumerate((("x", col_gap), ("y", row_gap))):
        if axis == "x":
            spans = [(b.x0, b.x1) for b in items]
        else:
            spans = [(b.y0, b.y1) for b in items]
        for lo, hi in _gaps(spans):
            width = hi - lo
            if width > threshold:
                mid = (lo + hi) / 2
                key = (width, -axis_rank, -mid if axis == "x" else mid)
                if best is None or key > best[:3]:
                    best = (width, -axis_rank, key[2], axis, mid)
    if best is None:
        return None
    return best[3], best[4]


def xy_cut(boxes: Sequence[BBox], row_gap: float, col_gap: float) -> list[list[int]]:
    """Group box indices into leaves, returned in reading order.

    Cuts on the widest qualifying gap; x-cuts order left to right, y-cuts
    top to bottom.
    """
    out: list[list[int]] = []

    def recurse(idx: list[int]) -> None:
        if len(idx) <= 1:
            if idx:
                out.append(idx)
            return
        cut = _best_cut([boxes[i] for i in idx], row_gap, col_gap)
        if cut is None:
            out.append(sorted(idx))
            return
        axis, pos = cut
        if axis == "x":
            first = [i for i in idx if boxes[i].x1 <= pos]
            second = [i for i in idx if boxes[i].x1 > pos]
        else:
            first = [i for i in idx if boxes[i].y0 >= pos]
            second = [i for i in idx if boxes[i].y0 < pos]
        recurse(first)
        recurse(second)

    recurse(list(range(len(boxes))))
    return out


def page_metrics(runs: Sequence[TextRun]) -> tuple[float, float]:
    """Median line height and median character width over ``runs``."""
    heights = [r.bbox.height for r in runs]
    widths = [r.bbox.width / len(r.text) for r in runs if r.text]
    return statistics.median(heights), statistics.median(widths) if widths else 0.0


def detect_layout_rules(runs: Sequence[TextRun], media_box: BBox) -> list[LayoutBox]:
    if not runs:
        return []
    line_height, char_width = page_metrics(runs)
    # a canonical order makes the result independent of input order
    ordered = sorted(runs, key=lambda r: (-r.bbox.y1, r.bbox.x0, r.bbox.y0, r.bbox.x1, r.text, r.font, r.size))
    bboxes = [r.bbox for r in ordered]
    leaves = xy_cut(bboxes, ROW_GAP_FACTOR * line_height, COLUMN_GAP_FACTOR * char_width)

    body_size = statistics.median(r.size for r in runs)
    out: list[LayoutBox] = []
    leaf_sizes = []
    for leaf in leaves:
        box = union_all(bboxes[i] for i in leaf)
        if box.y0 >= media_box.y1 - MARGIN_BAND or box.y1 <= media_box.y0 + MARGIN_BAND:
            cls = LayoutClass.ABANDON
        else:
            cls = LayoutClass.PLAIN_TEXT
        out.append(LayoutBox(cls, box, 1.0))
        leaf_sizes.append(max(ordered[i].size for i in leaf))
    candidates = [i for i, b in enumerate(out) if b.cls is LayoutClass.PLAIN_TEXT]
    if candidates:
        top = max(candidates, key=lambda i: (leaf_sizes[i], -i))
        if leaf_sizes[top] > body_size * TITLE_SIZE_RATIO:
            out[top] = LayoutBox(LayoutClass.TITLE, out[top].bbox, 1.0)
    return out
