from __future__ import annotations

import pytest

from pdftrans import synth
from pdftrans.translators.cache import TranslationCache


def golden_corpus() -> dict[str, bytes]:
    """The five hand-built documents every end-to-end check runs on."""
    return {
        "single_column": synth.build_pdf([synth.single_column_page(seed=1, pages_label=1)]),
        "two_column": synth.build_pdf(
            [synth.two_column_page(seed=2, page_number=1), synth.two_column_page(seed=7, page_number=2)]
        ),
        "formula": synth.build_pdf([synth.formula_page()]),
        "image_caption": synth.build_pdf([synth.image_caption_page()]),
        "cjk": synth.build_pdf([synth.cjk_page()]),
    }


@pytest.fixture(scope="session")
def corpus() -> dict[str, bytes]:
    return golden_corpus()


@pytest.fixture
def memory_cache() -> TranslationCache:
    return TranslationCache(None)


def minimal_pdf(content: bytes, media_box: str = "0 0 612 792", extra_trailer: bytes = b"") -> bytes:
    """A one-page Helvetica document written out by hand, xref offsets included."""
    objects = [
        b"<< /Type /Catalog /Pages 2 0 R >>",
        b"<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        (
            b"<< /Type /Page /Parent 2 0 R /MediaBox [" + media_box.encode() + b"] "
            b"/Resources << /Font << /F1 5 0 R >> >> /Contents 4 0 R >>"
        ),
        b"<< /Length " + str(len(content)).encode() + b" >>\nstream\n" + content + b"\nendstream",
        b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>",
    ]
    out = bytearray(b"%PDF-1.4\n")
    offsets = []
    for i, body in enumerate(objects, 1):
        offsets.append(len(out))
        out += f"{i} 0 obj\n".encode() + body + b"\nendobj\n"
    xref = len(out)
    out += f"xref\n0 {len(objects) + 1}\n0000000000 65535 f \n".encode()
    for off in offsets:
        out += f"{off:010d} 00000 n \n".encode()
    out += f"trailer\n<< /Size {len(objects) + 1} /Root 1 0 R ".encode() + extra_trailer + b">>\n"
    out += f"startxref\n{xref}\n%%EOF\n".encode()
    return bytes(out)
