"""Regenerate src/pdftrans/pdf/data/std14.json from reportlab's AFM tables.

Run once by hand; the JSON is committed so reportlab is not a runtime dependency.
"""
import json
from pathlib import Path

from reportlab.pdfbase import _fontdata

# Codes the PDF reference leaves undefined in WinAnsiEncoding.
WINANSI_UNDEFINED = (0x7F, 0x81, 0x8D, 0x8F, 0x90, 0x9D)

out = {"widths": {}, "ascent_descent": {}, "encodings": {}}
for name, widths in _fontdata.widthsByFontGlyph.items():
    out["widths"][name] = dict(sorted(widths.items()))
for name, (asc, desc) in _fontdata.ascent_descent.items():
    out["ascent_descent"][name] = [asc, desc]
for name in ("WinAnsiEncoding", "MacRomanEncoding", "StandardEncoding",
             "SymbolEncoding", "ZapfDingbatsEncoding", "PDFDocEncoding"):
    table = list(_fontdata.encodings[name])
    if name == "WinAnsiEncoding":
        for code in WINANSI_UNDEFINED:
            table[code] = None
    out["encodings"][name] = table

dest = Path(__file__).resolve().parents[1] / "src/pdftrans/pdf/data/std14.json"
dest.write_text(json.dumps(out, separators=(",", ":")))
print(dest, dest.stat().st_size)
