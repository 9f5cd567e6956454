"""Content-stream interpretation into positioned text runs."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

from ..model import IDENTITY, BBox, FontRef, Matrix, TextRun, apply_matrix, mult_matrix
from .content import Operator
from .fonts import decode_string, split_codes

logger = logging.getLogger(__name__)

# A TJ displacement larger than this (in em) ends the current run.
KERNING_BREAK_EM = 0.5
_EPS = 1e-9


@dataclass
class TextState:
    font: str | None = None
    size: float = 0.0
    char_spacing: float = 0.0
    word_spacing: float = 0.0
    scaling: float = 100.0
    leading: float = 0.0
    rise: float = 0.0
    tm: Matrix = IDENTITY
    tlm: Matrix = IDENTITY


@dataclass
class _RunBuilder:
    font: FontRef
    state: TextState
    start_tm: Matrix
    ctm: Matrix
    pieces: list = field(default_factory=list)
    texts: list = field(default_factory=list)
    sources: list = field(default_factory=list)
    advance: float = 0.0


def _num(v) -> float:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    raise ValueError(f"expected number, got {v!r}")


def glyph_advance(font: FontRef, raw: bytes, state: TextState) -> float:
    """Horizontal pen displacement (unscaled text space) for showing ``raw``."""
    th = state.scaling / 100.0
    total = 0.0
    for code, length in split_codes(font, raw):
        w = font.width(code) / 1000.0
        tx = w * state.size + state.char_spacing
        if length == 1 and code == 32:
            tx += state.word_spacing
        total += tx * th
    return total


def kern_advance(amount: float, state: TextState) -> float:
    return -amount / 1000.0 * state.size * state.scaling / 100.0


class TextExtractor:
    """Interprets the text and transformation operators of one page."""

    def __init__(
        self,
        fonts: dict[str, FontRef],
        page_index: int,
        media_box: BBox | None = None,
        warnings: list[str] | None = None,
        fallback_font: FontRef | None = None,
    ) -> None:
        self.fonts = fonts
        self.page_index = page_index
        self.media_box = media_box
        self.warnings = warnings if warnings is not None else []
        self.fallback_font = fallback_font
        self.runs: list[TextRun] = []
        self.max_qdepth = 0
        self.end_qdepth = 0
        # (op index, piece index) -> (advance, font size, horizontal scale)
        self.piece_metrics: dict[tuple[int, int], tuple[float, float, float]] = {}

    def _warn(self, msg: str) -> None:
        logger.debug(msg)
        self.warnings.append(msg)

    def run(self, ops: list[Operator]) -> list[TextRun]:
        ctm = IDENTITY
        stack: list[tuple[Matrix, TextState]] = []
        ts = TextState()
        builder: _RunBuilder | None = None

        def flush() -> None:
            nonlocal builder
            if builder is not None:
                self._finish(builder)
                builder = None

        for index, op in enumerate(ops):
            name = op.name
            args = op.operands
            if name not in ("Tj", "TJ"):
                flush()
            try:
                if name == "q":
                    stack.append((ctm, replace(ts)))
                    self.max_qdepth = max(self.max_qdepth, len(stack))
                elif name == "Q":
                    if stack:
                        ctm, saved = stack.pop()
                        ts = replace(saved, tm=ts.tm, tlm=ts.tlm)
                elif name == "cm":
                    ctm = mult_matrix(tuple(_num(a) for a in args[:6]), ctm)
                elif name == "BT":
                    ts.tm = ts.tlm = IDENTITY
                elif name == "Tf":
                    ts.font = str(args[0])
                    ts.size = _num(args[1])
                elif name == "Tc":
                    ts.char_spacing = _num(args[0])
                elif name == "Tw":
                    ts.word_spacing = _num(args[0])
                elif name == "Tz":
                    ts.scaling = _num(args[0])
                elif name == "TL":
                    ts.leading = _num(args[0])
                elif name == "Ts":
                    ts.rise = _num(args[0])
                elif name == "Td":
                    ts.tlm = mult_matrix((1, 0, 0, 1, _num(args[0]), _num(args[1])), ts.tlm)
                    ts.tm = ts.tlm
                elif name == "TD":
                    ts.leading = -_num(args[1])
                    ts.tlm = mult_matrix((1, 0, 0, 1, _num(args[0]), _num(args[1])), ts.tlm)
                    ts.tm = ts.tlm
                elif name == "Tm":
                    ts.tlm = ts.tm = tuple(_num(a) for a in args[:6])
                elif name == "T*":
                    ts.tlm = mult_matrix((1, 0, 0, 1, 0, -ts.leading), ts.tlm)
                    ts.tm = ts.tlm
                elif name in ("Tj", "'", '"'):
                    if name == '"':
                        ts.word_spacing = _num(args[0])
                        ts.char_spacing = _num(args[1])
                    if name != "Tj":
                        ts.tlm = mult_matrix((1, 0, 0, 1, 0, -ts.leading), ts.tlm)
                        ts.tm = ts.tlm
                    string = args[-1]
                    if not isinstance(string, bytes):
                        raise ValueError("show operand is not a string")
                    builder = self._show(builder, ts, ctm, index, [string])
                    if name != "Tj":
                        flush()
                elif name == "TJ":
                    arr = args[0] if args else []
                    if not isinstance(arr, list):
                        raise ValueError("TJ operand is not an array")
                    builder = self._show(builder, ts, ctm, index, arr)
            except (ValueError, IndexError, TypeError) as exc:
                self._warn(f"page {self.page_index}: bad operands for {name} at {op.byte_span}: {exc}")
        flush()
        self.end_qdepth = len(stack)
        return self.runs

    def _font(self, ts: TextState) -> FontRef | None:
        if ts.font is None:
            return None
        font = self.fonts.get(ts.font)
        if font is None:
            self._warn(f"page {self.page_index}: font /{ts.font} not in resources")
            font = self.fallback_font
        return font

    def _show(self, builder, ts: TextState, ctm: Matrix, index: int, pieces: list):
        font = self._font(ts)
        if font is None:
            self._warn(f"page {self.page_index}: text shown without a font")
            return builder
        for pi, piece in enumerate(pieces):
            if isinstance(piece, bytes):
                if builder is None:
                    builder = _RunBuilder(font=font, state=replace(ts), start_tm=ts.tm, ctm=ctm)
                adv = glyph_advance(font, piece, ts)
                self.piece_metrics[(index, pi)] = (adv, ts.size, ts.scaling / 100.0)
                builder.pieces.append(piece)
                builder.texts.append(decode_string(font, piece, self.warnings))
                _add_source(builder, index, pi)
                builder.advance += adv
                ts.tm = mult_matrix((1, 0, 0, 1, adv, 0), ts.tm)
            elif isinstance(piece, (int, float)) and not isinstance(piece, bool):
                adv = kern_advance(piece, ts)
                if abs(piece) / 1000.0 > KERNING_BREAK_EM:
                    if builder is not None:
                        self._finish(builder)
                        builder = None
                elif builder is not None:
                    builder.pieces.append(float(piece))
                    _add_source(builder, index, pi)
                    builder.advance += adv
                ts.tm = mult_matrix((1, 0, 0, 1, adv, 0), ts.tm)
            else:
                self._warn(f"page {self.page_index}: ignoring TJ element {piece!r}")
        return builder

    def _finish(self, b: _RunBuilder) -> None:
        # trailing kerning numbers belong to no glyph
        while b.pieces and not isinstance(b.pieces[-1], bytes):
            b.pieces.pop()
            b.sources.pop()
        text = "".join(b.texts)
        if not text:
            return
        font, st = b.font, b.state
        m = mult_matrix(b.start_tm, b.ctm)
        advance = sum(
            glyph_advance(font, p, st) if isinstance(p, bytes) else kern_advance(p, st)
            for p in b.pieces
        )
        lo = st.rise + font.descent / 1000.0 * st.size
        hi = st.rise + font.ascent / 1000.0 * st.size
        corners = [apply_matrix(m, x, y) for x in (0.0, advance) for y in (lo, hi)]
        bbox = BBox.from_points(corners)
        a, bb, c, d = m[:4]
        upright = abs(bb) < _EPS and abs(c) < _EPS and a > 0 and d > 0
        scale = d if upright else math.sqrt(abs(a * d - bb * c))
        size = abs(st.size) * scale
        if self.media_box is not None:
            limit = self.media_box.expand(1.0)
            if not limit.contains(bbox):
                x0, y0 = max(bbox.x0, limit.x0), max(bbox.y0, limit.y0)
                x1, y1 = min(bbox.x1, limit.x1), min(bbox.y1, limit.y1)
                if x0 >= x1 or y0 >= y1:
                    self._warn(f"page {self.page_index}: text {text[:20]!r} outside MediaBox ignored")
                    return
                bbox = BBox(x0, y0, x1, y1)
        if size <= 0:
            self._warn(f"page {self.page_index}: zero-size text {text[:20]!r} ignored")
            return
        self.runs.append(
            TextRun(
                text=text,
                bbox=bbox,
                font=font.id,
                size=size,
                page_index=self.page_index,
                index=len(self.runs),
                origin=apply_matrix(m, 0.0, st.rise),
                upright=upright,
                matrix=m,
                font_size=st.size,
                raw=tuple(b.pieces),
                sources=_compress_sources(b.sources),
            )
        )


def _add_source(b: _RunBuilder, op_index: int, piece_index: int) -> None:
    b.sources.append((op_index, piece_index))


def _compress_sources(sources: list[tuple[int, int]]) -> tuple[tuple[int, int, int], ...]:
    out: list[list[int]] = []
    for op_index, piece in sources:
        if out and out[-1][0] == op_index and out[-1][2] == piece:
            out[-1][2] = piece + 1
        else:
            out.append([op_index, piece, piece + 1])
    return tuple(tuple(x) for x in out)


def extract_text_runs(
    ops: list[Operator],
    fonts: dict[str, FontRef],
    page_index: int = 0,
    media_box: BBox | None = None,
    warnings: list[str] | None = None,
) -> list[TextRun]:
    """Interpret ``ops`` and return the page's text runs in extraction order.

    ``fonts`` maps page resource names to fonts.
    """
    return TextExtractor(fonts, page_index, media_box, warnings).run(ops)
