"""Turn assigned text runs into reading-order paragraphs with masked math.

Protected runs (math fonts, symbol-only text) are replaced in the text sent
to translators by private-use scalars U+E000, U+E001, ... so services only
ever see plain text and the original glyphs can be put back untouched.
"""
from __future__ import annotations

import logging
import statistics
import unicodedata
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .layout.rules import xy_cut
from .layout.types import NON_TRANSLATABLE, LayoutBox, LayoutClass
from .model import BBox, FontRef, TextRun, union_all

logger = logging.getLogger(__name__)

PUA_FIRST = 0xE000
PUA_LAST = 0xF8FF
ROW_TOLERANCE = 0.6
WORD_GAP = 0.15

# Computer Modern text faces; every other "CM*" font is treated as math.
CM_TEXT_FACES = (
    "CMR", "CMBX", "CMTI", "CMSS", "CMTT", "CMSL", "CMCSC", "CMB10", "CMDUNH",
    "CMFF", "CMFI", "CMITT", "CMU", "CMVTT", "CMTCSC",
)
OPERATOR_GLYPHS = frozenset("=+-<>*/^_|()[]{}−±×÷·≤≥≠≈∞→←∑∏∫∂√")
_SYMBOL_RANGES = (
    (0x2190, 0x21FF),  # arrows
    (0x2200, 0x22FF),  # mathematical operators
    (0x27C0, 0x27EF),
    (0x2980, 0x2AFF),
    (0x1D400, 0x1D7FF),  # mathematical alphanumerics
)
_SYMBOL_SINGLES = frozenset("ℂℕℙℚℝℤℓ±×÷")


class PlaceholderViolation(ValueError):
    """A translation lost, repeated or invented a placeholder token."""

    def __init__(self, kind: str, token: str) -> None:
        super().__init__(f"{kind} placeholder U+{ord(token):04X}")
        self.kind = kind
        self.token = token


@dataclass(frozen=True)
class ProtectedGroup:
    runs: tuple[TextRun, ...]
    bbox: BBox

    @property
    def text(self) -> str:
        return "".join(r.text for r in self.runs)


@dataclass
class PlaceholderMap:
    groups: list[ProtectedGroup] = field(default_factory=list)

    def token(self, k: int) -> str:
        return chr(PUA_FIRST + k)

    @property
    def tokens(self) -> list[str]:
        return [self.token(k) for k in range(len(self.groups))]

    def add(self, group: ProtectedGroup) -> str:
        self.groups.append(group)
        return self.token(len(self.groups) - 1)

    def lookup(self, token: str) -> ProtectedGroup | None:
        k = ord(token) - PUA_FIRST
        if 0 <= k < len(self.groups):
            return self.groups[k]
        return None

    def __len__(self) -> int:
        return len(self.groups)


@dataclass
class Paragraph:
    id: int
    cls: LayoutClass
    box: BBox
    runs: list[TextRun]
    # separators[i] is the text inserted before runs[i] when joining
    separators: list[str] = field(default_factory=list)
    masked_text: str = ""
    placeholders: PlaceholderMap = field(default_factory=PlaceholderMap)
    translatable: bool = True
    box_index: int | None = None

    @property
    def text(self) -> str:
        return "".join(sep + r.text for sep, r in zip(self.separators, self.runs))

    @property
    def size(self) -> float:
        return statistics.median(r.size for r in self.runs)

    @property
    def protected_runs(self) -> list[TextRun]:
        return [r for g in self.placeholders.groups for r in g.runs]


@dataclass(frozen=True)
class Segment:
    """One piece of restored output: either plain text or a protected group."""

    text: str = ""
    group: ProtectedGroup | None = None

    @property
    def protected(self) -> bool:
        return self.group is not None


def is_private_use(ch: str) -> bool:
    cp = ord(ch)
    return PUA_FIRST <= cp <= PUA_LAST or cp >= 0xF0000


def sanitize_text(text: str, warnings: list[str] | None = None) -> str:
    """Drop private-use scalars so placeholder tokens cannot collide."""
    if not any(is_private_use(c) for c in text):
        return text
    cleaned = "".join(c for c in text if not is_private_use(c))
    msg = f"stripped private-use characters from {cleaned[:30]!r}"
    logger.warning(msg)
    if warnings is not None:
        warnings.append(msg)
    return cleaned


def _run_key(r: TextRun):
    return (-r.baseline, r.bbox.x0, r.bbox.x1, r.bbox.y0, r.text, r.font, r.size, r.page_index, r.index)


def order_rows(runs: Sequence[TextRun]) -> list[list[TextRun]]:
    """Bucket runs into baseline rows (top first), each sorted left to right."""
    if not runs:
        return []
    ordered = sorted(runs, key=_run_key)
    tol = ROW_TOLERANCE * statistics.median(r.bbox.height for r in ordered)
    rows: list[list[TextRun]] = []
    anchor = None
    for r in ordered:
        if anchor is None or anchor - r.baseline > tol:
            rows.append([])
            anchor = r.baseline
        rows[-1].append(r)
    return [sorted(row, key=lambda r: (r.bbox.x0, _run_key(r))) for row in rows]


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return (
        0x3000 <= cp <= 0x9FFF
        or 0xAC00 <= cp <= 0xD7AF
        or 0xF900 <= cp <= 0xFAFF
        or 0xFF00 <= cp <= 0xFFEF
        or 0x20000 <= cp <= 0x2FFFF
    )


def _row_join(prev: TextRun, cur: TextRun) -> str:
    if not prev.text or not cur.text or prev.text[-1].isspace() or cur.text[0].isspace():
        return ""
    gap = cur.bbox.x0 - prev.bbox.x1
    if gap > WORD_GAP * max(prev.size, cur.size):
        return " "
    return ""


def _line_join(prev_row_text: str, next_text: str) -> tuple[str, bool]:
    """Separator between two rows; second item says the hyphen was eaten."""
    if not prev_row_text or not next_text:
        return "", False
    tail, head = prev_row_text.rstrip(), next_text.lstrip()
    if not head or not tail:
        return "", False
    if (
        tail.endswith("-")
        and len(tail) >= 2
        and tail[-2].isalpha()
        and head[0].islower()
    ):
        return "", True
    if prev_row_text[-1].isspace() or next_text[0].isspace():
        return "", False
    if _is_cjk(tail[-1]) and _is_cjk(head[0]):
        return "", False
    return " ", False


def _build_paragraph(pid: int, box: LayoutBox, box_index: int, runs: list[TextRun], warnings) -> Paragraph:
    clean = [replace(r, text=sanitize_text(r.text, warnings)) for r in runs]
    rows = order_rows([r for r in clean if r.text])
    ordered: list[TextRun] = []
    seps: list[str] = []
    row_text = ""
    for row in rows:
        for j, r in enumerate(row):
            if j == 0:
                sep, eat = _line_join(row_text, r.text) if ordered else ("", False)
                if eat:
                    # the hyphen is the last visible char of the previous run
                    last = ordered[-1]
                    stripped = last.text.rstrip()
                    ordered[-1] = replace(last, text=stripped[:-1])
                row_text = ""
            else:
                sep = _row_join(row[j - 1], r)
            ordered.append(r)
            seps.append(sep)
            row_text += sep + r.text
    translatable = box.cls not in NON_TRANSLATABLE and all(r.upright for r in ordered)
    p = Paragraph(
        id=pid,
        cls=box.cls,
        box=box.bbox,
        runs=ordered,
        separators=seps,
        translatable=translatable,
        box_index=box_index,
    )
    p.masked_text = p.text
    return p


def order_boxes(boxes: Sequence[LayoutBox]) -> list[int]:
    """Box indices in reading order: columns left to right, then top down."""
    if not boxes:
        return []
    canon = sorted(
        range(len(boxes)),
        key=lambda i: (-boxes[i].bbox.y1, boxes[i].bbox.x0, boxes[i].bbox.y0, boxes[i].bbox.x1, boxes[i].cls.value, i),
    )
    leaves = xy_cut([boxes[i].bbox for i in canon], 0.0, 0.0)
    out = []
    for leaf in leaves:
        members = sorted(leaf, key=lambda k: (-boxes[canon[k]].bbox.y1, boxes[canon[k]].bbox.x0, k))
        out.extend(canon[k] for k in members)
    return out


def assemble_paragraphs(
    runs: Sequence[TextRun],
    assignment: Sequence[int | None],
    boxes: Sequence[LayoutBox],
    warnings: list[str] | None = None,
    first_id: int = 0,
) -> list[Paragraph]:
    """One paragraph per non-empty box, in reading order.

    ``assignment[i]`` is the box index for ``runs[i]`` (None = unassigned).
    """
    if len(assignment) != len(runs):
        raise ValueError("assignment must cover every run")
    members: dict[int, list[TextRun]] = {}
    for run, idx in zip(runs, assignment):
        if idx is not None:
            members.setdefault(idx, []).append(run)
    out: list[Paragraph] = []
    for bi in order_boxes(boxes):
        if bi in members:
            p = _build_paragraph(first_id + len(out), boxes[bi], bi, members[bi], warnings)
            if p.runs:
                out.append(p)
    return out


def is_math_font(font: FontRef | None) -> bool:
    if font is None:
        return False
    name = font.plain_name
    upper = name.upper()
    if "MATH" in upper or "MSAM" in upper or "MSBM" in upper:
        return True
    return upper.startswith("CM") and not upper.startswith(CM_TEXT_FACES)


def is_symbol_text(text: str) -> bool:
    core = text.strip()
    if not core:
        return False
    for ch in core:
        if ch.isspace() or ch in _SYMBOL_SINGLES:
            continue
        cp = ord(ch)
        if not any(lo <= cp <= hi for lo, hi in _SYMBOL_RANGES):
            return False
    return True


def _italic_operand(i: int, runs: list[TextRun], fonts: Mapping[str, FontRef]) -> bool:
    r = runs[i]
    core = r.text.strip()
    font = fonts.get(r.font)
    if len(core) != 1 or not core.isalpha() or font is None or not font.italic:
        return False
    before = runs[i - 1].text.rstrip() if i > 0 else ""
    after = runs[i + 1].text.lstrip() if i + 1 < len(runs) else ""
    return bool((before and before[-1] in OPERATOR_GLYPHS) or (after and after[0] in OPERATOR_GLYPHS))


def protected_mask(runs: list[TextRun], fonts: Mapping[str, FontRef]) -> list[bool]:
    return [
        is_math_font(fonts.get(r.font)) or is_symbol_text(r.text) or _italic_operand(i, runs, fonts)
        for i, r in enumerate(runs)
    ]


def protect_elements(p: Paragraph, fonts: Mapping[str, FontRef], warnings: list[str] | None = None) -> Paragraph:
    """Fill ``masked_text`` and ``placeholders``; consecutive protected runs
    on the same row share one token. Returns ``p``."""
    runs = [replace(r, text=sanitize_text(r.text, warnings)) for r in p.runs]
    p.runs = runs
    mask = protected_mask(runs, fonts)
    pmap = PlaceholderMap()
    parts: list[str] = []
    group: list[TextRun] = []

    def close() -> None:
        if group:
            parts.append(pmap.add(ProtectedGroup(tuple(group), union_all(r.bbox for r in group))))
            group.clear()

    for i, r in enumerate(runs):
        sep = p.separators[i]
        if mask[i]:
            same_row = group and abs(group[-1].baseline - r.baseline) <= ROW_TOLERANCE * r.bbox.height
            if group and not same_row:
                close()
            if not group:
                parts.append(sep)
            group.append(r)
        else:
            close()
            parts.append(sep + r.text)
    close()
    p.masked_text = "".join(parts)
    p.placeholders = pmap
    return p


def restore_elements(translated: str, pmap: PlaceholderMap) -> list[Segment]:
    """Split ``translated`` on placeholder tokens, validating each is used once."""
    segments: list[Segment] = []
    seen: set[str] = set()
    buf: list[str] = []
    for ch in translated:
        if not is_private_use(ch):
            buf.append(ch)
            continue
        group = pmap.lookup(ch)
        if group is None:
            raise PlaceholderViolation("unknown", ch)
        if ch in seen:
            raise PlaceholderViolation("duplicated", ch)
        seen.add(ch)
        if buf:
            segments.append(Segment(text="".join(buf)))
            buf = []
        segments.append(Segment(group=group))
    if buf:
        segments.append(Segment(text="".join(buf)))
    for tok in pmap.tokens:
        if tok not in seen:
            raise PlaceholderViolation("missing", tok)
    return segments


def strip_placeholders(text: str) -> str:
    return "".join(c for c in text if not is_private_use(c))


def normalize_for_compare(text: str) -> str:
    return unicodedata.normalize("NFC", " ".join(text.split()))
