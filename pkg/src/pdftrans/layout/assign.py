from __future__ import annotations

from typing import Sequence

from ..model import TextRun, bbox_overlap_area
from .types import LayoutBox, LayoutClass


def _rank(run: TextRun, boxes: Sequence[LayoutBox], candidates: list[int]) -> int | None:
    best = None
    best_key = None
    for i in candidates:
        overlap = bbox_overlap_area(run.bbox, boxes[i].bbox)
        if overlap <= 0:
            continue
        key = (overlap, boxes[i].confidence, -boxes[i].bbox.area, -i)
        if best_key is None or key > best_key:
            best, best_key = i, key
    return best


def assign_runs(runs: Sequence[TextRun], boxes: Sequence[LayoutBox]) -> list[int | None]:
    """Index of the owning box for each run, or None.

    Largest overlap wins; ties go to higher confidence, then the smaller
    box, then the earlier box. Abandon boxes only take runs nothing else
    overlaps.
    """
    regular = [i for i, b in enumerate(boxes) if b.cls is not LayoutClass.ABANDON]
    abandon = [i for i, b in enumerate(boxes) if b.cls is LayoutClass.ABANDON]
    out: list[int | None] = []
    for run in runs:
        idx = _rank(run, boxes, regular)
        if idx is None:
            idx = _rank(run, boxes, abandon)
        out.append(idx)
    return out
