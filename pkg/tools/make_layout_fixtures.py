"""Regenerate the rasterized two-column page fixtures under tests/fixtures/pages."""
from __future__ import annotations

from pathlib import Path

from pdftrans import synth
from pdftrans.layout import BoxRasterizer
from pdftrans.pdf import parse_document

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "pages"


def fixture_page(i: int) -> bytes:
    return synth.build_pdf([synth.two_column_page(seed=i, title=i % 2 == 0, paragraphs=1 + i % 3)])


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for i in range(10):
        page = parse_document(fixture_page(i)).pages[0]
        image = BoxRasterizer().render(b"", 0, page.media_box, page.runs)
        image.save(OUT / f"two_column_{i}.png", optimize=True)


if __name__ == "__main__":
    main()
