"""Synthetic PDF documents with exactly known text geometry.

Used by the benchmark harness and the test corpus. Text is drawn with one
``BT .. Tf .. Tm .. Tj ET`` block per run so every run position is explicit.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .pdf.fonts import _std14, encoding_table
from .pdf.objects import Name, Ref
from .pdf.writer import PdfWriter, build_page_tree

LOREM = (
    "translation of scientific documents must keep every figure table and formula "
    "exactly where the authors placed them while the surrounding prose changes "
    "language the method reads positioned text detects regions and writes the "
    "result back into the same boxes"
).split()


@dataclass
class FontSpec:
    resource: str
    base: str
    kind: str = "std14"  # std14 | type1 | cid
    widths: dict[int, float] = field(default_factory=dict)
    ascent: float = 750.0
    descent: float = -250.0
    italic: bool = False
    # cid fonts: unicode char -> code
    cid_map: dict[str, int] = field(default_factory=dict)


HELVETICA = FontSpec("F1", "Helvetica")
HELVETICA_BOLD = FontSpec("F2", "Helvetica-Bold")


def _math_font(resource: str, base: str, italic: bool) -> FontSpec:
    widths = {c: 520.0 for c in range(32, 256)}
    widths[32] = 333.0
    return FontSpec(resource, base, kind="type1", widths=widths, ascent=750.0, descent=-250.0, italic=italic)


CMMI = _math_font("M1", "CMMI10", True)
CMSY = _math_font("M2", "CMSY10", False)


def cjk_font(chars: str, resource: str = "C1") -> FontSpec:
    cid_map = {ch: i + 1 for i, ch in enumerate(dict.fromkeys(chars))}
    widths = {cid: 1000.0 for cid in cid_map.values()}
    return FontSpec(resource, "SynthSongti", kind="cid", widths=widths, ascent=880.0, descent=-120.0, cid_map=cid_map)


def std_width(base: str, text: str) -> float:
    """Advance of ``text`` in 1/1000 em for a WinAnsi-encoded standard font."""
    names = encoding_table("WinAnsiEncoding")
    afm = _std14()["widths"][base]
    total = 0.0
    for b in text.encode("cp1252"):
        total += afm.get(names[b], 0)
    return total


def text_width(font: FontSpec, text: str) -> float:
    if font.kind == "std14":
        return std_width(font.base, text)
    if font.kind == "cid":
        return sum(font.widths[font.cid_map[ch]] for ch in text)
    return sum(font.widths.get(b, 500.0) for b in text.encode("cp1252"))


def encode(font: FontSpec, text: str) -> bytes:
    if font.kind == "cid":
        return b"".join(font.cid_map[ch].to_bytes(2, "big") for ch in text)
    return text.encode("cp1252")


def _pdf_string(raw: bytes) -> bytes:
    return b"<" + raw.hex().upper().encode() + b">"


@dataclass
class PlacedRun:
    text: str
    font: FontSpec
    size: float
    x: float
    y: float

    @property
    def width(self) -> float:
        return text_width(self.font, self.text) / 1000.0 * self.size

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        asc, desc = self.ascent_descent()
        return (self.x, self.y + desc / 1000 * self.size, self.x + self.width, self.y + asc / 1000 * self.size)

    def ascent_descent(self) -> tuple[float, float]:
        if self.font.kind == "std14":
            return tuple(_std14()["ascent_descent"][self.font.base])
        return self.font.ascent, self.font.descent


@dataclass
class SynthPage:
    width: float = 612.0
    height: float = 792.0
    runs: list[PlacedRun] = field(default_factory=list)
    # raw content prefixes (paths, images) drawn before the text
    graphics: list[bytes] = field(default_factory=list)
    images: dict[str, tuple[int, int, bytes]] = field(default_factory=dict)

    def add(self, text: str, font: FontSpec, size: float, x: float, y: float) -> PlacedRun:
        run = PlacedRun(text, font, size, x, y)
        self.runs.append(run)
        return run

    def content(self) -> bytes:
        parts = list(self.graphics)
        for run in self.runs:
            parts.append(
                b"BT /%s %s Tf 1 0 0 1 %s %s Tm %s Tj ET"
                % (
                    run.font.resource.encode(),
                    _fmt(run.size),
                    _fmt(run.x),
                    _fmt(run.y),
                    _pdf_string(encode(run.font, run.text)),
                )
            )
        return b"\n".join(parts) + b"\n"


def _fmt(v: float) -> bytes:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return s.encode() if s not in ("", "-0") else b"0"


def _font_objects(w: PdfWriter, spec: FontSpec) -> Ref:
    if spec.kind == "std14":
        return w.add(
            {
                "Type": Name("Font"),
                "Subtype": Name("Type1"),
                "BaseFont": Name(spec.base),
                "Encoding": Name("WinAnsiEncoding"),
            }
        )
    if spec.kind == "type1":
        desc = w.add(
            {
                "Type": Name("FontDescriptor"),
                "FontName": Name(spec.base),
                "Flags": 4 | (64 if spec.italic else 0),
                "FontBBox": [0, spec.descent, 1000, spec.ascent],
                "ItalicAngle": -14 if spec.italic else 0,
                "Ascent": spec.ascent,
                "Descent": spec.descent,
                "CapHeight": 700,
                "StemV": 80,
            }
        )
        first, last = 32, 255
        return w.add(
            {
                "Type": Name("Font"),
                "Subtype": Name("Type1"),
                "BaseFont": Name(spec.base),
                "FirstChar": first,
                "LastChar": last,
                "Widths": [spec.widths.get(c, 500.0) for c in range(first, last + 1)],
                "Encoding": Name("WinAnsiEncoding"),
                "FontDescriptor": desc,
            }
        )
    # composite font with a ToUnicode CMap
    lines = [
        b"/CIDInit /ProcSet findresource begin 12 dict begin begincmap",
        b"/CMapName /Synth-UCS def /CMapType 2 def",
        b"1 begincodespacerange <0000> <FFFF> endcodespacerange",
        b"%d beginbfchar" % len(spec.cid_map),
    ]
    for ch, cid in sorted(spec.cid_map.items(), key=lambda kv: kv[1]):
        lines.append(b"<%04X> <%s>" % (cid, ch.encode("utf-16-be").hex().upper().encode()))
    lines += [b"endbfchar", b"endcmap CMapName currentdict /CMap defineresource pop end end"]
    tounicode = w.add_stream(b"\n".join(lines))
    desc = w.add(
        {
            "Type": Name("FontDescriptor"),
            "FontName": Name(spec.base),
            "Flags": 4,
            "FontBBox": [0, spec.descent, 1000, spec.ascent],
            "ItalicAngle": 0,
            "Ascent": spec.ascent,
            "Descent": spec.descent,
            "CapHeight": 700,
            "StemV": 80,
        }
    )
    w_array: list = []
    for cid in sorted(spec.widths):
        w_array += [cid, [spec.widths[cid]]]
    cidfont = w.add(
        {
            "Type": Name("Font"),
            "Subtype": Name("CIDFontType2"),
            "BaseFont": Name(spec.base),
            "CIDSystemInfo": {"Registry": b"Adobe", "Ordering": b"Identity", "Supplement": 0},
            "FontDescriptor": desc,
            "DW": 1000,
            "W": w_array,
            "CIDToGIDMap": Name("Identity"),
        }
    )
    return w.add(
        {
            "Type": Name("Font"),
            "Subtype": Name("Type0"),
            "BaseFont": Name(spec.base),
            "Encoding": Name("Identity-H"),
            "DescendantFonts": [cidfont],
            "ToUnicode": tounicode,
        }
    )


def build_pdf(pages: list[SynthPage], compress: bool = True) -> bytes:
    w = PdfWriter("1.7")
    font_refs: dict[str, Ref] = {}
    pages_ref = w.reserve()
    page_refs = []
    for page in pages:
        fonts = {}
        for run in page.runs:
            spec = run.font
            key = f"{spec.resource}:{spec.base}"
            if key not in font_refs:
                font_refs[key] = _font_objects(w, spec)
            fonts[spec.resource] = font_refs[key]
        xobjects = {}
        for name, (iw, ih, rgb) in page.images.items():
            xobjects[name] = w.add_stream(
                rgb,
                {
                    "Type": Name("XObject"),
                    "Subtype": Name("Image"),
                    "Width": iw,
                    "Height": ih,
                    "ColorSpace": Name("DeviceRGB"),
                    "BitsPerComponent": 8,
                },
            )
        resources: dict = {"Font": fonts}
        if xobjects:
            resources["XObject"] = xobjects
        content = w.add_stream(page.content(), compress=compress)
        page_refs.append(
            w.add(
                {
                    "Type": Name("Page"),
                    "Parent": pages_ref,
                    "MediaBox": [0, 0, page.width, page.height],
                    "Resources": resources,
                    "Contents": content,
                }
            )
        )
    root = build_page_tree(w, page_refs, pages_ref)
    return w.write(root)


# -- canned layouts -----------------------------------------------------------


def _words(seed: int, n: int) -> list[str]:
    rng = random.Random(seed)
    return [rng.choice(LOREM) for _ in range(n)]


def fill_lines(
    page: SynthPage,
    font: FontSpec,
    size: float,
    x0: float,
    x1: float,
    y_top: float,
    lines: int,
    seed: int = 0,
    pitch: float | None = None,
    word_runs: bool = False,
) -> float:
    """Fill ``lines`` left-aligned lines; returns the baseline below the block."""
    pitch = pitch or size * 1.25
    y = y_top
    words = _words(seed, lines * 20)
    k = 0
    for _ in range(lines):
        line: list[str] = []
        while k < len(words):
            trial = " ".join(line + [words[k]])
            if text_width(font, trial) / 1000 * size > x1 - x0:
                break
            line.append(words[k])
            k += 1
        if word_runs:
            x = x0
            space = text_width(font, " ") / 1000 * size
            for word in line:
                run = page.add(word, font, size, x, y)
                x += run.width + space
        else:
            page.add(" ".join(line), font, size, x0, y)
        y -= pitch
    return y


def single_column_page(seed: int = 0, pages_label: int | None = None) -> SynthPage:
    page = SynthPage()
    page.add("Layout Preserving Translation", HELVETICA_BOLD, 18, 72, 720)
    y = 680.0
    for p in range(4):
        y = fill_lines(page, HELVETICA, 11, 72, 540, y, 5, seed=seed + p) - 16
    if pages_label is not None:
        page.add(str(pages_label), HELVETICA, 9, 300, 20)
    return page


def two_column_page(
    seed: int = 0, page_number: int | None = None, title: bool = True, paragraphs: int = 3
) -> SynthPage:
    """Columns at x in [50, 280] and [320, 550]; paragraphs separated by 18pt."""
    page = SynthPage()
    if title:
        page.add("Two Column Article Title", HELVETICA_BOLD, 16, 50, 730)
    for col, (x0, x1) in enumerate(((50.0, 280.0), (320.0, 550.0))):
        y = 690.0
        for p in range(paragraphs):
            y = fill_lines(page, HELVETICA, 10, x0, x1, y, 8, seed=seed + 3 * col + p) - 18
    if page_number is not None:
        page.add(str(page_number), HELVETICA, 9, 303, 20)
    return page


def formula_page() -> SynthPage:
    page = SynthPage()
    page.add("Energy and Mass", HELVETICA_BOLD, 16, 72, 720)
    # inline math: text run, math run, text run on one baseline
    y = 680.0
    r = page.add("the relation ", HELVETICA, 11, 72, y)
    m = page.add("E=mc2", CMMI, 11, 72 + r.width, y)
    page.add(" holds for every particle at rest", HELVETICA, 11, 72 + r.width + m.width, y)
    y -= 14
    r = page.add("and the sum ", HELVETICA, 11, 72, y)
    m = page.add("x+y", CMMI, 11, 72 + r.width, y)
    page.add(" is bounded by the norm", HELVETICA, 11, 72 + r.width + m.width, y)
    # display formulas in their own blocks
    page.add("f(x)=ax2+bx+c", CMMI, 12, 250, 610)
    page.add("<=>", CMSY, 12, 260, 560)
    y = 520.0
    r = page.add("where ", HELVETICA, 11, 72, y)
    m = page.add("a", CMMI, 11, 72 + r.width, y)
    page.add(" is the leading coefficient of the polynomial", HELVETICA, 11, 72 + r.width + m.width, y)
    fill_lines(page, HELVETICA, 11, 72, 540, 440, 4, seed=5)
    return page


def image_caption_page() -> SynthPage:
    page = SynthPage()
    iw, ih = 8, 6
    rgb = b"".join(bytes(t) for t in ((x * 30 % 256, y * 40 % 256, (x + y) * 15 % 256) for y in range(ih) for x in range(iw)))
    page.images["Im1"] = (iw, ih, rgb)
    page.graphics.append(b"q 300 0 0 200 156 450 cm /Im1 Do Q")
    page.graphics.append(b"0.5 w 156 440 m 456 440 l S")
    page.add("Figure 1: Layout of the translation pipeline", HELVETICA, 10, 156, 420)
    fill_lines(page, HELVETICA, 11, 72, 540, 360, 6, seed=11)
    return page


CJK_TEXT = ("版面保持翻译", "科学文献的翻译需要保持公式和图表的位置", "该方法检测区域并将结果写回原始方框")


def cjk_page() -> SynthPage:
    font = cjk_font("".join(CJK_TEXT))
    page = SynthPage()
    page.add(CJK_TEXT[0], font, 18, 72, 720)
    page.add(CJK_TEXT[1], font, 11, 72, 680)
    page.add(CJK_TEXT[2], font, 11, 72, 666)
    page.add("Mixed Latin line in the CJK page", HELVETICA, 11, 72, 620)
    return page


def synthetic_article(pages: int = 10) -> bytes:
    """A multi-page two-column article with page numbers."""
    return build_pdf([two_column_page(seed=i, page_number=i + 1) for i in range(pages)])

