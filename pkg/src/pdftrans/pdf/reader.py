"""Parse PDF bytes into a :class:`~pdftrans.model.DocumentIR`."""
from __future__ import annotations

import logging

from ..model import BBox, DocumentIR, FontRef, PageIR
from .content import TEXT_OPERATORS, tokenize_content_stream
from .document import PdfFile
from .extract import TextExtractor
from .filters import UnsupportedFilter
from .fonts import build_font, font_key
from .objects import EmptyInput, MalformedPdf, PdfError, TruncatedStream

logger = logging.getLogger(__name__)

DEFAULT_MEDIA_BOX = (0.0, 0.0, 612.0, 792.0)


def _media_box(pdf: PdfFile, page: dict, warnings: list[str], index: int) -> BBox:
    box = pdf.resolve(page.get("MediaBox"))
    if isinstance(box, list) and len(box) == 4:
        try:
            vals = [float(pdf.resolve(v)) for v in box]
            return BBox(min(vals[0], vals[2]), min(vals[1], vals[3]), max(vals[0], vals[2]), max(vals[1], vals[3]))
        except (TypeError, ValueError):
            pass
    warnings.append(f"page {index}: missing or invalid MediaBox, assuming US Letter")
    return BBox(*DEFAULT_MEDIA_BOX)


def _page_fonts(pdf: PdfFile, resources: dict, index: int, table: dict[str, FontRef], warnings: list[str]) -> dict[str, FontRef]:
    fonts: dict[str, FontRef] = {}
    font_dict = pdf.resolve(resources.get("Font")) if isinstance(resources, dict) else None
    if not isinstance(font_dict, dict):
        return fonts
    for name, ref in font_dict.items():
        key = font_key(ref, index, name)
        font = table.get(key)
        if font is None:
            fdict = pdf.resolve(ref)
            if not isinstance(fdict, dict):
                warnings.append(f"page {index}: font /{name} is not a dictionary")
                continue
            try:
                font = build_font(pdf, key, name, fdict, warnings)
            except (PdfError, KeyError, TypeError, ValueError) as exc:
                warnings.append(f"page {index}: font /{name} unusable ({exc})")
                continue
            table[key] = font
        fonts[name] = font
    return fonts


def parse_document(data: bytes) -> DocumentIR:
    """Parse ``data`` into pages, fonts and positioned text runs.

    Raises EmptyInput, MalformedPdf or EncryptedPdf.
    """
    if not data:
        raise EmptyInput("empty input")
    try:
        return _parse(data)
    except (KeyError, TypeError, ValueError, IndexError, RecursionError) as exc:
        raise MalformedPdf(f"malformed document structure: {exc!r}") from exc


def _parse(data: bytes) -> DocumentIR:
    pdf = PdfFile(data)
    warnings: list[str] = []
    fonts: dict[str, FontRef] = {}
    pages: list[PageIR] = []
    for index, (ref, page) in enumerate(pdf.pages()):
        media = _media_box(pdf, page, warnings, index)
        resources = pdf.resolve(page.get("Resources")) or {}
        if not isinstance(resources, dict):
            warnings.append(f"page {index}: /Resources is not a dictionary")
            resources = {}
        try:
            content = pdf.page_content(page)
        except UnsupportedFilter as exc:
            raise MalformedPdf(f"page {index}: unsupported content filter {exc}") from exc
        try:
            ops = tokenize_content_stream(content, warnings)
        except TruncatedStream as exc:
            raise MalformedPdf(f"page {index}: {exc}") from exc
        page_fonts = _page_fonts(pdf, resources, index, fonts, warnings)
        extractor = TextExtractor(page_fonts, index, media, warnings)
        runs = extractor.run(ops)
        rotate = pdf.resolve(page.get("Rotate")) or 0
        pages.append(
            PageIR(
                index=index,
                media_box=media,
                runs=runs,
                non_text_ops=[op for op in ops if op.name not in TEXT_OPERATORS],
                content=content,
                operators=ops,
                page_ref=ref,
                resources=resources,
                rotate=int(rotate) if isinstance(rotate, (int, float)) else 0,
                qdepth=extractor.end_qdepth,
                piece_metrics=extractor.piece_metrics,
            )
        )
    warnings = list(dict.fromkeys(pdf.warnings + warnings))
    for w in warnings:
        logger.debug(w)
    return DocumentIR(pages=pages, fonts=fonts, source_bytes=pdf.data, warnings=warnings, store=pdf)


__all__ = ["parse_document", "EmptyInput", "MalformedPdf"]
