"""Source-font metrics and code-to-unicode decoding."""
from __future__ import annotations

import json
import logging
import re
from functools import lru_cache
from importlib import resources

from fontTools import agl

from ..model import FontRef
from .lexer import Lexer, parse_object
from .objects import Keyword, MalformedPdf, Name, Ref, Stream

logger = logging.getLogger(__name__)

REPLACEMENT = "�"

_STD14_ALIASES = {
    "Arial": "Helvetica",
    "Arial,Bold": "Helvetica-Bold",
    "Arial,Italic": "Helvetica-Oblique",
    "Arial,BoldItalic": "Helvetica-BoldOblique",
    "ArialMT": "Helvetica",
    "Arial-BoldMT": "Helvetica-Bold",
    "Arial-ItalicMT": "Helvetica-Oblique",
    "TimesNewRoman": "Times-Roman",
    "TimesNewRomanPSMT": "Times-Roman",
    "TimesNewRoman,Bold": "Times-Bold",
    "TimesNewRoman,Italic": "Times-Italic",
    "CourierNew": "Courier",
    "CourierNewPSMT": "Courier",
    "Symbol,Bold": "Symbol",
}
# FontBBox top/bottom for the two symbolic base fonts, whose AFMs carry no
# ascender/descender.
_SYMBOLIC_EXTENTS = {"Symbol": (1010, -293), "ZapfDingbats": (820, -143)}


@lru_cache(maxsize=1)
def _std14() -> dict:
    text = resources.files("pdftrans.pdf").joinpath("data/std14.json").read_text()
    return json.loads(text)


def standard_font_name(base: str) -> str | None:
    data = _std14()
    if base in data["widths"]:
        return base
    return _STD14_ALIASES.get(base)


def encoding_table(name: str) -> list[str | None]:
    return _std14()["encodings"][name]


@lru_cache(maxsize=4096)
def glyph_to_unicode(glyph: str) -> str | None:
    if not glyph or glyph == ".notdef":
        return None
    text = agl.toUnicode(glyph)
    if text:
        return text
    m = re.fullmatch(r"(?:uni([0-9A-Fa-f]{4})+|u([0-9A-Fa-f]{4,6})|[gG]?(\d+))", glyph)
    if m and m.group(2):
        return chr(int(m.group(2), 16))
    return None


# -- CMaps ------------------------------------------------------------------


def _hex_code(b: bytes) -> int:
    return int.from_bytes(b, "big")


def _utf16(b: bytes) -> str:
    if len(b) % 2:
        return b.decode("latin-1")
    return b.decode("utf-16-be", "replace")


class CMap:
    """Parsed CMap: codespace ranges plus code->CID and code->unicode tables."""

    def __init__(self) -> None:
        self.codespace: list[tuple[int, bytes, bytes]] = []
        self.cid: dict[int, int] = {}
        self.unicode: dict[int, str] = {}

    @classmethod
    def parse(cls, data: bytes) -> CMap:
        cmap = cls()
        lex = Lexer(data)
        stack: list = []
        while True:
            try:
                tok = lex.next_token()
            except EOFError:
                break
            except MalformedPdf:
                continue
            if tok in ("[", "<<"):
                lex.pos -= len(tok)
                try:
                    stack.append(parse_object(lex, allow_refs=False))
                except Exception:
                    stack.clear()
                continue
            kw = str(tok) if isinstance(tok, Keyword) else None
            if kw is None:
                stack.append(tok)
                continue
            if kw == "endcodespacerange":
                for lo, hi in zip(stack[::2], stack[1::2]):
                    if isinstance(lo, bytes) and isinstance(hi, bytes):
                        cmap.codespace.append((len(lo), lo, hi))
            elif kw == "endbfchar":
                for src, dst in zip(stack[::2], stack[1::2]):
                    if isinstance(src, bytes):
                        cmap.unicode[_hex_code(src)] = _utf16(dst) if isinstance(dst, bytes) else str(dst)
            elif kw == "endbfrange":
                for lo, hi, dst in zip(stack[::3], stack[1::3], stack[2::3]):
                    if not (isinstance(lo, bytes) and isinstance(hi, bytes)):
                        continue
                    a, b = _hex_code(lo), _hex_code(hi)
                    if b - a > 0xFFFF:
                        continue
                    if isinstance(dst, list):
                        for i, d in enumerate(dst[: b - a + 1]):
                            if isinstance(d, bytes):
                                cmap.unicode[a + i] = _utf16(d)
                    elif isinstance(dst, bytes) and dst:
                        base = bytearray(dst)
                        for i in range(b - a + 1):
                            v = int.from_bytes(base, "big") + i
                            cmap.unicode[a + i] = _utf16(v.to_bytes(len(base), "big"))
            elif kw == "endcidchar":
                for src, dst in zip(stack[::2], stack[1::2]):
                    if isinstance(src, bytes) and isinstance(dst, int):
                        cmap.cid[_hex_code(src)] = dst
            elif kw == "endcidrange":
                for lo, hi, dst in zip(stack[::3], stack[1::3], stack[2::3]):
                    if isinstance(lo, bytes) and isinstance(hi, bytes) and isinstance(dst, int):
                        a, b = _hex_code(lo), _hex_code(hi)
                        if b - a <= 0xFFFF:
                            for i in range(b - a + 1):
                                cmap.cid[a + i] = dst + i
            stack.clear()
        return cmap


IDENTITY_CODESPACE = [(2, b"\x00\x00", b"\xff\xff")]


def split_codes(font: FontRef, raw: bytes) -> list[tuple[int, int]]:
    """Split raw string bytes into (code, byte length) pairs."""
    if not font.is_cid:
        return [(b, 1) for b in raw]
    ranges = font.codespace or IDENTITY_CODESPACE
    out = []
    i = 0
    n = len(raw)
    while i < n:
        for length, lo, hi in ranges:
            chunk = raw[i : i + length]
            if len(chunk) == length and all(l <= c <= h for c, l, h in zip(chunk, lo, hi)):
                out.append((_hex_code(chunk), length))
                i += length
                break
        else:
            length = min(ranges[0][0], n - i)
            out.append((_hex_code(raw[i : i + length]), length))
            i += length
    return out


def decode_string(font: FontRef, raw: bytes, warnings: list[str] | None = None) -> str:
    """Decode show-string bytes to unicode; unmapped codes become U+FFFD."""
    parts = []
    for code, _ in split_codes(font, raw):
        text = font.to_unicode.get(code)
        if text is None:
            if warnings is not None:
                warnings.append(f"font {font.base_name}: no unicode for code {code:#x}")
            text = REPLACEMENT
        parts.append(text)
    return "".join(parts)


# -- font dictionaries ------------------------------------------------------


def _num(v, default: float = 0.0) -> float:
    return float(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else default


def build_font(pdf, font_id: str, resource_name: str, fdict: dict, warnings: list[str]) -> FontRef:
    """Build a :class:`FontRef` from a resolved font dictionary."""
    subtype = pdf.resolve(fdict.get("Subtype"))
    base = str(pdf.resolve(fdict.get("BaseFont")) or resource_name)
    if subtype == "Type0":
        return _build_type0(pdf, font_id, resource_name, base, fdict, warnings)
    return _build_simple(pdf, font_id, resource_name, base, subtype, fdict, warnings)


def _descriptor_metrics(pdf, desc, font: FontRef) -> None:
    desc = pdf.resolve(desc)
    if not isinstance(desc, dict):
        return
    asc = _num(pdf.resolve(desc.get("Ascent")))
    dsc = _num(pdf.resolve(desc.get("Descent")))
    bbox = pdf.resolve(desc.get("FontBBox"))
    if asc == 0 and isinstance(bbox, list) and len(bbox) == 4:
        asc = _num(pdf.resolve(bbox[3]))
        dsc = _num(pdf.resolve(bbox[1]))
    if asc > 0:
        font.ascent = asc
        font.descent = min(dsc, 0.0) if dsc else (asc - 1000.0 if asc < 1000 else -200.0)
    flags = int(_num(pdf.resolve(desc.get("Flags"))))
    italic_angle = _num(pdf.resolve(desc.get("ItalicAngle")))
    if flags & 64 or italic_angle != 0:
        font.italic = True
    if "MissingWidth" in desc:
        font.default_width = _num(pdf.resolve(desc["MissingWidth"]), 500.0)


def _build_simple(pdf, font_id, resource_name, base, subtype, fdict, warnings) -> FontRef:
    font = FontRef(id=font_id, resource_name=resource_name, base_name=base, encoding="simple-byte")
    plain = font.plain_name
    std = standard_font_name(plain)
    if re.search(r"Italic|Oblique", plain):
        font.italic = True

    # base encoding -> glyph names
    symbolic_std = std in ("Symbol", "ZapfDingbats")
    if symbolic_std:
        names = list(encoding_table(f"{std}Encoding"))
    else:
        names = list(encoding_table("StandardEncoding"))
    enc = pdf.resolve(fdict.get("Encoding"))
    differences = None
    if isinstance(enc, str) and enc in ("WinAnsiEncoding", "MacRomanEncoding", "StandardEncoding", "PDFDocEncoding"):
        names = list(encoding_table(str(enc)))
    elif isinstance(enc, dict):
        benc = pdf.resolve(enc.get("BaseEncoding"))
        if isinstance(benc, str) and benc in ("WinAnsiEncoding", "MacRomanEncoding", "StandardEncoding"):
            names = list(encoding_table(str(benc)))
        differences = pdf.resolve(enc.get("Differences"))
    elif enc is not None:
        warnings.append(f"font {base}: unsupported /Encoding {enc!r}, using StandardEncoding")
    if isinstance(differences, list):
        code = 0
        for item in differences:
            item = pdf.resolve(item)
            if isinstance(item, int):
                code = item
            elif isinstance(item, str) and 0 <= code < 256:
                names[code] = str(item)
                code += 1

    for code, gname in enumerate(names):
        if gname:
            text = glyph_to_unicode(gname)
            if text:
                font.to_unicode[code] = text

    # metrics
    if std:
        data = _std14()
        asc, desc = data["ascent_descent"][std]
        if (asc, desc) == (0, 0):
            asc, desc = _SYMBOLIC_EXTENTS[std]
        font.ascent, font.descent = float(asc), float(desc)
        afm = data["widths"][std]
        for code, gname in enumerate(names):
            if gname and gname in afm:
                font.widths[code] = float(afm[gname])
    _descriptor_metrics(pdf, fdict.get("FontDescriptor"), font)

    widths = pdf.resolve(fdict.get("Widths"))
    if isinstance(widths, list):
        first = int(_num(pdf.resolve(fdict.get("FirstChar"))))
        for i, w in enumerate(widths):
            font.widths[first + i] = _num(pdf.resolve(w))

    if subtype == "Type3":
        matrix = pdf.resolve(fdict.get("FontMatrix")) or [0.001, 0, 0, 0.001, 0, 0]
        font.font_matrix = tuple(_num(pdf.resolve(v)) for v in matrix)
        scale = font.font_matrix[0] * 1000
        font.widths = {k: v * scale for k, v in font.widths.items()}
        bbox = pdf.resolve(fdict.get("FontBBox"))
        if isinstance(bbox, list) and len(bbox) == 4:
            top = _num(pdf.resolve(bbox[3])) * font.font_matrix[3] * 1000
            bottom = _num(pdf.resolve(bbox[1])) * font.font_matrix[3] * 1000
            if top > bottom:
                font.ascent, font.descent = top, min(bottom, 0.0)

    tu = pdf.resolve(fdict.get("ToUnicode"))
    if isinstance(tu, Stream):
        try:
            cmap = CMap.parse(pdf.decode_stream(tu))
            font.to_unicode.update(cmap.unicode)
        except Exception as exc:  # noqa: BLE001 - damaged CMap is a warning
            warnings.append(f"font {base}: unreadable ToUnicode ({exc})")
    return font


def _build_type0(pdf, font_id, resource_name, base, fdict, warnings) -> FontRef:
    font = FontRef(
        id=font_id,
        resource_name=resource_name,
        base_name=base,
        encoding="cid-with-tounicode",
        default_width=1000.0,
    )
    enc = pdf.resolve(fdict.get("Encoding"))
    if isinstance(enc, Name) or isinstance(enc, str):
        if enc in ("Identity-H", "Identity-V"):
            font.codespace = list(IDENTITY_CODESPACE)
            font.vertical = enc.endswith("V")
        else:
            warnings.append(f"font {base}: predefined CMap {enc} not bundled, treating codes as 2-byte CIDs")
            font.codespace = list(IDENTITY_CODESPACE)
    elif isinstance(enc, Stream):
        cmap = CMap.parse(pdf.decode_stream(enc))
        font.codespace = sorted(cmap.codespace, key=lambda r: r[0]) or list(IDENTITY_CODESPACE)
        font.code_to_cid = cmap.cid
    if font.vertical:
        warnings.append(f"font {base}: vertical writing extracted as horizontal")

    descendants = pdf.resolve(fdict.get("DescendantFonts"))
    cid_font = pdf.resolve(descendants[0]) if isinstance(descendants, list) and descendants else {}
    if not isinstance(cid_font, dict):
        raise MalformedPdf(f"font {base}: bad DescendantFonts")
    _descriptor_metrics(pdf, cid_font.get("FontDescriptor"), font)
    font.italic = font.italic or bool(re.search(r"Italic|Oblique", font.plain_name))
    dw = pdf.resolve(cid_font.get("DW"))
    if isinstance(dw, (int, float)):
        font.default_width = float(dw)
    w = pdf.resolve(cid_font.get("W"))
    if isinstance(w, list):
        items = [pdf.resolve(x) for x in w]
        i = 0
        while i < len(items):
            start = items[i]
            nxt = items[i + 1] if i + 1 < len(items) else None
            if isinstance(nxt, list):
                for j, wv in enumerate(nxt):
                    font.widths[int(start) + j] = _num(pdf.resolve(wv))
                i += 2
            elif i + 2 < len(items):
                for cid in range(int(start), int(nxt) + 1):
                    font.widths[cid] = _num(items[i + 2])
                i += 3
            else:
                break

    tu = pdf.resolve(fdict.get("ToUnicode"))
    if isinstance(tu, Stream):
        try:
            font.to_unicode.update(CMap.parse(pdf.decode_stream(tu)).unicode)
        except Exception as exc:  # noqa: BLE001
            warnings.append(f"font {base}: unreadable ToUnicode ({exc})")
    else:
        warnings.append(f"font {base}: composite font without ToUnicode, text will not decode")
    return font


def font_key(ref, page_index: int, resource_name: str) -> str:
    if isinstance(ref, Ref):
        return f"obj{ref.num}"
    return f"p{page_index}:{resource_name}"
