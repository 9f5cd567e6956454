"""Write translated documents.

The original page content is kept byte-for-byte except for the show strings
of runs that were re-typeset: each removed string becomes a TJ displacement
of the same width, so the text state after it is unchanged. The new text is
appended in its own BT/ET block using an embedded subset font.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from ..model import DocumentIR, PageIR, TextRun
from ..pdf.content import Operator
from ..pdf.document import PdfFile
from ..pdf.objects import Name, PdfError, Ref, format_number, serialize
from ..pdf.writer import ObjectCopier, PdfWriter, build_page_tree
from ..segmenter import Paragraph
from .fonts import FontSubset, TargetFont, subset_font
from .layout import FitReport, PositionedLine

logger = logging.getLogger(__name__)

_PAGE_ATTRS = ("Resources", "MediaBox", "CropBox", "Rotate")


class EmitError(RuntimeError):
    pass


class PageCountMismatch(EmitError):
    pass


@dataclass
class ParagraphRender:
    paragraph: Paragraph
    lines: list[PositionedLine]
    font: TargetFont
    report: FitReport

    @property
    def removed_runs(self) -> list[TextRun]:
        protected = {id(r) for r in self.paragraph.protected_runs}
        return [r for r in self.paragraph.runs if id(r) not in protected]


@dataclass
class PageRender:
    index: int
    paragraphs: list[ParagraphRender] = field(default_factory=list)

    @property
    def changed(self) -> bool:
        return bool(self.paragraphs)


# ---------------------------------------------------------------- content


def _number(v: float) -> bytes:
    return format_number(round(v, 6))


def _displacement(page: PageIR, op_index: int, piece: int) -> float:
    """TJ number that moves the pen as far as the removed string did."""
    adv, size, th = page.piece_metrics.get((op_index, piece), (0.0, 0.0, 1.0))
    if size * th == 0:
        return 0.0
    return -adv * 1000.0 / (size * th)


def _rewrite_op(page: PageIR, index: int, op: Operator, removed: set[int]) -> bytes:
    name = op.name
    if name == "TJ":
        arr = op.operands[0]
    else:
        arr = [op.operands[-1]]
    items = []
    for pi, piece in enumerate(arr):
        if isinstance(piece, bytes) and pi in removed:
            items.append(_number(_displacement(page, index, pi)))
        else:
            items.append(serialize(piece))
    tj = b"[" + b" ".join(items) + b"] TJ"
    if name == "'":
        return b"T* " + tj
    if name == '"':
        aw, ac = op.operands[0], op.operands[1]
        return serialize(aw) + b" Tw " + serialize(ac) + b" Tc T* " + tj
    return tj


def remove_runs(page: PageIR, runs: Sequence[TextRun]) -> bytes:
    """Page content with the glyphs of ``runs`` replaced by equal-width gaps."""
    targets: dict[int, set[int]] = {}
    for run in runs:
        for op_index, start, end in run.sources:
            targets.setdefault(op_index, set()).update(range(start, end))
    if not targets:
        return page.content
    out = bytearray()
    pos = 0
    for index in sorted(targets):
        op = page.operators[index]
        if op.name not in ("Tj", "TJ", "'", '"'):
            raise EmitError(f"page {page.index}: run source {index} is a {op.name} operator")
        start, end = op.byte_span
        out += page.content[pos:start]
        out += _rewrite_op(page, index, op, targets[index])
        pos = end
    out += page.content[pos:]
    return bytes(out)


def _text_block(renders: Sequence[tuple[ParagraphRender, str, FontSubset]]) -> bytes:
    parts = [b"BT"]
    for pr, resname, sub in renders:
        if pr.report.overflow:
            continue
        parts.append(b"0 g 0 Tr 0 Tc 0 Tw 100 Tz 0 Ts")
        for line in pr.lines:
            parts.append(b"/%s %s Tf" % (resname.encode(), _number(line.size)))
            parts.append(b"1 0 0 1 %s %s Tm" % (_number(line.x), _number(line.y)))
            parts.append(b"<" + sub.encode(line.text).hex().upper().encode() + b"> Tj")
    parts.append(b"ET")
    # overflowing paragraphs are clipped to their box
    for pr, resname, sub in renders:
        if not pr.report.overflow:
            continue
        b = pr.paragraph.box
        parts.append(b"q %s %s %s %s re W n BT 0 g 0 Tr 0 Tc 0 Tw 100 Tz 0 Ts" % tuple(
            _number(v) for v in (b.x0, b.y0, b.width, b.height)))
        for line in pr.lines:
            parts.append(b"/%s %s Tf" % (resname.encode(), _number(line.size)))
            parts.append(b"1 0 0 1 %s %s Tm" % (_number(line.x), _number(line.y)))
            parts.append(b"<" + sub.encode(line.text).hex().upper().encode() + b"> Tj")
        parts.append(b"ET Q")
    return b"\n".join(parts) + b"\n"


def page_content(page: PageIR, render: PageRender, fonts: dict[str, tuple[str, FontSubset]]) -> bytes:
    removed = [r for pr in render.paragraphs for r in pr.removed_runs]
    body = remove_runs(page, removed)
    renders = [(pr, *fonts[_font_key(pr.font)]) for pr in render.paragraphs]
    return b"q\n" + body + b"\n" + b"Q\n" * page.qdepth + b"Q\n" + _text_block(renders)


# ---------------------------------------------------------------- fonts


def _font_key(font: TargetFont) -> str:
    return f"{font.path}#{font.font_number}"


def _to_unicode(sub: FontSubset) -> bytes:
    by_gid: dict[int, int] = {}
    for cp, gid in sorted(sub.gids.items()):
        if gid and gid not in by_gid:
            by_gid[gid] = cp
    lines = [
        b"/CIDInit /ProcSet findresource begin",
        b"12 dict begin",
        b"begincmap",
        b"/CIDSystemInfo << /Registry (Adobe) /Ordering (UCS) /Supplement 0 >> def",
        b"/CMapName /Adobe-Identity-UCS def",
        b"/CMapType 2 def",
        b"1 begincodespacerange",
        b"<0000> <FFFF>",
        b"endcodespacerange",
    ]
    items = sorted(by_gid.items())
    for i in range(0, len(items), 100):
        chunk = items[i : i + 100]
        lines.append(b"%d beginbfchar" % len(chunk))
        for gid, cp in chunk:
            lines.append(b"<%04X> <%s>" % (gid, chr(cp).encode("utf-16-be").hex().upper().encode()))
        lines.append(b"endbfchar")
    lines += [b"endcmap", b"CMapName currentdict /CMap defineresource pop", b"end", b"end"]
    return b"\n".join(lines) + b"\n"


def _widths_array(sub: FontSubset) -> list:
    out: list = []
    for gid in sorted(sub.widths):
        out.append(gid)
        out.append([round(sub.widths[gid], 3)])
    return out


def embed_font(writer: PdfWriter, sub: FontSubset) -> Ref:
    """Add a Type0/Identity-H font for ``sub``; returns the font ref."""
    scale = 1000.0 / sub.units_per_em
    if sub.is_cff:
        file_ref = writer.add_stream(sub.data, {"Subtype": Name("OpenType")})
        file_key = "FontFile3"
    else:
        file_ref = writer.add_stream(sub.data, {"Length1": len(sub.data)})
        file_key = "FontFile2"
    descriptor = writer.add(
        {
            "Type": Name("FontDescriptor"),
            "FontName": Name(sub.name),
            "Flags": 4,
            "FontBBox": [round(v, 3) for v in sub.bbox],
            "ItalicAngle": 0,
            "Ascent": round(sub.ascender * scale, 3),
            "Descent": round(sub.descender * scale, 3),
            "CapHeight": round(sub.ascender * scale, 3),
            "StemV": 80,
            file_key: file_ref,
        }
    )
    cid = {
        "Type": Name("Font"),
        "Subtype": Name("CIDFontType0" if sub.is_cff else "CIDFontType2"),
        "BaseFont": Name(sub.name),
        "CIDSystemInfo": {"Registry": b"Adobe", "Ordering": b"Identity", "Supplement": 0},
        "FontDescriptor": descriptor,
        "DW": 1000,
        "W": _widths_array(sub),
    }
    if not sub.is_cff:
        cid["CIDToGIDMap"] = Name("Identity")
    cid_ref = writer.add(cid)
    tounicode = writer.add_stream(_to_unicode(sub))
    return writer.add(
        {
            "Type": Name("Font"),
            "Subtype": Name("Type0"),
            "BaseFont": Name(sub.name),
            "Encoding": Name("Identity-H"),
            "DescendantFonts": [cid_ref],
            "ToUnicode": tounicode,
        }
    )


def build_subsets(renders: Sequence[PageRender]) -> dict[str, tuple[TargetFont, FontSubset]]:
    usage: dict[str, tuple[TargetFont, set[int]]] = {}
    for render in renders:
        for pr in render.paragraphs:
            key = _font_key(pr.font)
            entry = usage.setdefault(key, (pr.font, set()))
            for line in pr.lines:
                entry[1].update(ord(c) for c in line.text)
    return {key: (font, subset_font(font, used)) for key, (font, used) in sorted(usage.items()) if used}


# ---------------------------------------------------------------- documents


def _flat_page(
    pdf: PdfFile,
    copier: ObjectCopier,
    page: dict,
    parent: Ref,
    skip: frozenset[str] = frozenset(),
) -> dict:
    out = copier.copy(page, skip_keys=frozenset({"Parent"}) | skip)
    out["Parent"] = parent
    return out


def _resources_with_fonts(pdf: PdfFile, copier: ObjectCopier, page: dict, fonts: list[tuple[str, Ref]]) -> dict:
    res = pdf.resolve(page.get("Resources"))
    res = dict(res) if isinstance(res, dict) else {}
    out = {k: copier.copy(v) for k, v in res.items() if k != "Font"}
    font_dict = pdf.resolve(res.get("Font"))
    new_fonts = {k: copier.copy(v) for k, v in font_dict.items()} if isinstance(font_dict, dict) else {}
    for name, ref in fonts:
        new_fonts[name] = ref
    out["Font"] = new_fonts
    return out


def _resource_name(existing: set[str], k: int) -> str:
    name = f"PTF{k}"
    while name in existing:
        name += "x"
    return name


def _copy_info(pdf: PdfFile, copier: ObjectCopier) -> Ref | None:
    info = pdf.trailer.get("Info")
    if isinstance(info, Ref):
        try:
            return copier.copy(info)
        except PdfError:
            return None
    return None


def emit_pdf(doc: DocumentIR, renders: Sequence[PageRender] = ()) -> bytes:
    """Monolingual output: every page of ``doc`` with translated pages rewritten."""
    pdf: PdfFile = doc.store
    if pdf is None:
        raise EmitError("document has no object store")
    by_page = {r.index: r for r in renders if r.changed}
    for idx in by_page:
        if not 0 <= idx < len(doc.pages):
            raise EmitError(f"render for missing page {idx}")
    subsets = build_subsets(list(by_page.values()))
    writer = PdfWriter(pdf.version if pdf.version >= "1.4" else "1.4")
    copier = ObjectCopier(pdf, writer)
    font_refs = {key: embed_font(writer, sub) for key, (_, sub) in subsets.items()}
    pages_ref = writer.reserve()
    src_pages = pdf.pages()
    if len(src_pages) != len(doc.pages):
        raise EmitError("page tree changed since parsing")
    new_refs = []
    for ref, _ in src_pages:
        new = writer.reserve()
        if ref is not None:
            copier.premap(ref, new)
        new_refs.append(new)
    for i, ((ref, page), page_ir) in enumerate(zip(src_pages, doc.pages)):
        render = by_page.get(i)
        if render is None:
            writer.set(new_refs[i], _flat_page(pdf, copier, page, pages_ref))
            continue
        res = pdf.resolve(page.get("Resources"))
        existing = set(pdf.resolve(res.get("Font") or {}) or {}) if isinstance(res, dict) else set()
        used_keys = sorted({_font_key(pr.font) for pr in render.paragraphs})
        names: dict[str, tuple[str, FontSubset]] = {}
        page_fonts: list[tuple[str, Ref]] = []
        for k, key in enumerate(used_keys):
            name = _resource_name(existing, k)
            names[key] = (name, subsets[key][1])
            page_fonts.append((name, font_refs[key]))
        content = page_content(page_ir, render, names)
        out = _flat_page(pdf, copier, page, pages_ref, frozenset({"Contents", "Resources"}))
        out["Resources"] = _resources_with_fonts(pdf, copier, page, page_fonts)
        out["Contents"] = writer.add_stream(content)
        writer.set(new_refs[i], out)
    root = build_page_tree(writer, new_refs, pages_ref)
    return writer.write(root, _copy_info(pdf, copier))


def emit_dual(original: DocumentIR, mono: bytes) -> bytes:
    """Bilingual output: original page i followed by translated page i."""
    src: PdfFile = original.store
    try:
        trans = PdfFile(mono)
        trans_pages = trans.pages()
    except PdfError as exc:
        raise EmitError(f"translated document is unreadable: {exc}") from exc
    src_pages = src.pages()
    if len(trans_pages) != len(src_pages):
        raise PageCountMismatch(f"original has {len(src_pages)} pages, translation {len(trans_pages)}")
    writer = PdfWriter(src.version if src.version >= "1.4" else "1.4")
    copy_src = ObjectCopier(src, writer)
    copy_trans = ObjectCopier(trans, writer)
    pages_ref = writer.reserve()
    refs = []
    for (sref, _), (tref, _) in zip(src_pages, trans_pages):
        a, b = writer.reserve(), writer.reserve()
        if sref is not None:
            copy_src.premap(sref, a)
        if tref is not None:
            copy_trans.premap(tref, b)
        refs += [a, b]
    for i, ((_, spage), (_, tpage)) in enumerate(zip(src_pages, trans_pages)):
        writer.set(refs[2 * i], _flat_page(src, copy_src, spage, pages_ref))
        writer.set(refs[2 * i + 1], _flat_page(trans, copy_trans, tpage, pages_ref))
    root = build_page_tree(writer, refs, pages_ref)
    return writer.write(root, _copy_info(src, copy_src))
