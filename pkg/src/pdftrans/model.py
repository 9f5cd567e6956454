"""Shared document representation and geometry primitives.

All coordinates are PDF user space points with a bottom-left origin. Image
space (top-left origin) only exists inside :mod:`pdftrans.layout`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Iterable, Sequence

Matrix = tuple[float, float, float, float, float, float]
IDENTITY: Matrix = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def mult_matrix(m1: Sequence[float], m0: Sequence[float]) -> Matrix:
    """Return ``m1 x m0`` (apply m1 first, then m0)."""
    a1, b1, c1, d1, e1, f1 = m1
    a0, b0, c0, d0, e0, f0 = m0
    return (
        a0 * a1 + c0 * b1,
        b0 * a1 + d0 * b1,
        a0 * c1 + c0 * d1,
        b0 * c1 + d0 * d1,
        a0 * e1 + c0 * f1 + e0,
        b0 * e1 + d0 * f1 + f0,
    )


def apply_matrix(m: Sequence[float], x: float, y: float) -> tuple[float, float]:
    a, b, c, d, e, f = m
    return a * x + c * y + e, b * x + d * y + f


@dataclass(frozen=True, slots=True)
class BBox:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x0, self.y0, self.x1, self.y1)):
            raise ValueError(f"non-finite bbox {self!r}")
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise ValueError(f"inverted bbox {self!r}")

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]]) -> BBox:
        xs, ys = zip(*points)
        return cls(min(xs), min(ys), max(xs), max(ys))

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2

    def expand(self, d: float) -> BBox:
        return BBox(self.x0 - d, self.y0 - d, self.x1 + d, self.y1 + d)

    def contains(self, other: BBox, tol: float = 0.0) -> bool:
        return (
            other.x0 >= self.x0 - tol
            and other.y0 >= self.y0 - tol
            and other.x1 <= self.x1 + tol
            and other.y1 <= self.y1 + tol
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)


def bbox_overlap_area(a: BBox, b: BBox) -> float:
    w = min(a.x1, b.x1) - max(a.x0, b.x0)
    h = min(a.y1, b.y1) - max(a.y0, b.y0)
    if w <= 0 or h <= 0:
        return 0.0
    return w * h


def bbox_union(a: BBox, b: BBox) -> BBox:
    return BBox(min(a.x0, b.x0), min(a.y0, b.y0), max(a.x1, b.x1), max(a.y1, b.y1))


def union_all(boxes: Iterable[BBox]) -> BBox:
    return reduce(bbox_union, boxes)


def iou(a: BBox, b: BBox) -> float:
    inter = bbox_overlap_area(a, b)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


@dataclass
class FontRef:
    """Metrics and decoding data for one font resource of the source document.

    ``widths`` maps character codes (byte values for simple fonts, CIDs for
    composite fonts) to advance widths in 1/1000 em.
    """

    id: str
    resource_name: str
    base_name: str
    encoding: str  # "simple-byte" | "cid-with-tounicode"
    widths: dict[int, float] = field(default_factory=dict)
    default_width: float = 500.0
    ascent: float = 800.0
    descent: float = -200.0
    italic: bool = False
    # code -> unicode text
    to_unicode: dict[int, str] = field(default_factory=dict)
    # composite fonts: byte length of each code, from the encoding CMap
    code_lengths: tuple[int, ...] = (1,)
    codespace: list[tuple[int, bytes, bytes]] = field(default_factory=list)
    # code -> CID for composite fonts with a non-identity encoding CMap
    code_to_cid: dict[int, int] = field(default_factory=dict)
    vertical: bool = False
    font_matrix: Matrix = (0.001, 0.0, 0.0, 0.001, 0.0, 0.0)

    @property
    def is_cid(self) -> bool:
        return self.encoding == "cid-with-tounicode"

    @property
    def plain_name(self) -> str:
        """Base font name without the six-letter subset tag."""
        name = self.base_name
        if len(name) > 7 and name[6] == "+" and name[:6].isupper():
            return name[7:]
        return name

    def width(self, code: int) -> float:
        if self.is_cid:
            code = self.code_to_cid.get(code, code)
        return self.widths.get(code, self.default_width)


@dataclass(frozen=True)
class TextRun:
    """One positioned show-string fragment.

    ``matrix`` is the full text-space to user-space matrix at the first glyph
    (text matrix times CTM), ``raw`` the undecoded TJ-style pieces.
    """

    text: str
    bbox: BBox
    font: str
    size: float
    page_index: int
    index: int = 0
    origin: tuple[float, float] = (0.0, 0.0)
    upright: bool = True
    matrix: Matrix = IDENTITY
    font_size: float = 0.0
    raw: tuple[bytes | float, ...] = ()
    # (operator index, first piece, end piece) of each contributing show op
    sources: tuple[tuple[int, int, int], ...] = ()

    @property
    def baseline(self) -> float:
        return self.origin[1]


@dataclass
class PageIR:
    index: int
    media_box: BBox
    runs: list[TextRun] = field(default_factory=list)
    non_text_ops: list[Any] = field(default_factory=list)
    content: bytes = b""
    operators: list[Any] = field(default_factory=list)
    page_ref: Any = None
    resources: dict = field(default_factory=dict)
    rotate: int = 0
    qdepth: int = 0
    piece_metrics: dict = field(default_factory=dict)


@dataclass
class DocumentIR:
    pages: list[PageIR]
    fonts: dict[str, FontRef]
    source_bytes: bytes
    warnings: list[str] = field(default_factory=list)
    store: Any = None

    @property
    def page_count(self) -> int:
        return len(self.pages)
