"""Target-language fonts: lookup by script, metrics, subsetting."""
from __future__ import annotations

import functools
import hashlib
import io
import json
import logging
import os
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

from fontTools import subset as ft_subset
from fontTools.ttLib import TTFont, TTLibError

logger = logging.getLogger(__name__)

SYSTEM_FONT_DIRS = (
    "/usr/share/fonts",
    "/usr/local/share/fonts",
    "~/.local/share/fonts",
    "~/.fonts",
    "/Library/Fonts",
    "/System/Library/Fonts",
    "~/Library/Fonts",
    "C:/Windows/Fonts",
)
RTL_SCRIPTS = frozenset({"Arabic", "Hebrew"})


class FontSubsetError(RuntimeError):
    pass


class FontNotFound(RuntimeError):
    pass


def _data_dir() -> Path:
    return Path(str(resources.files("pdftrans.renderer") / "data"))


@functools.lru_cache(maxsize=1)
def script_font_table() -> dict:
    return json.loads((_data_dir() / "script_fonts.json").read_text(encoding="utf-8"))


@dataclass
class TargetFont:
    """A TrueType/OpenType font loaded for measuring and embedding."""

    path: str
    font_number: int = 0
    ttfont: TTFont = field(repr=False, default=None)
    units_per_em: int = 1000
    cmap: dict[int, str] = field(default_factory=dict, repr=False)
    advances: dict[str, int] = field(default_factory=dict, repr=False)
    ascender: int = 800
    descender: int = -200
    name: str = "Font"

    @classmethod
    def load(cls, path: str | os.PathLike, font_number: int = 0) -> TargetFont:
        return _load_font(str(path), font_number)

    @property
    def ascent(self) -> float:
        """Ascender in em."""
        return self.ascender / self.units_per_em

    @property
    def descent(self) -> float:
        return self.descender / self.units_per_em

    @property
    def is_cff(self) -> bool:
        return "glyf" not in self.ttfont

    def has_glyph(self, ch: str) -> bool:
        return ord(ch) in self.cmap

    def glyph_name(self, ch: str) -> str:
        return self.cmap.get(ord(ch), ".notdef")

    def char_width(self, ch: str) -> float:
        """Advance in em."""
        return self.advances.get(self.glyph_name(ch), 0) / self.units_per_em

    def text_width(self, text: str, size: float) -> float:
        return sum(self.char_width(c) for c in text) * size

    def missing(self, text: str) -> list[str]:
        return [c for c in text if not c.isspace() and ord(c) not in self.cmap]


_font_cache: dict[tuple[str, int], TargetFont] = {}
_font_lock = threading.Lock()


def _load_font(path: str, font_number: int) -> TargetFont:
    key = (os.path.abspath(path), font_number)
    with _font_lock:
        cached = _font_cache.get(key)
        if cached is not None:
            return cached
        try:
            tt = TTFont(path, fontNumber=font_number, recalcTimestamp=False, lazy=False)
            cmap = dict(tt.getBestCmap() or {})
            hmtx = tt["hmtx"].metrics
            upem = tt["head"].unitsPerEm
        except (TTLibError, OSError, KeyError, AssertionError) as exc:
            raise FontSubsetError(f"cannot load font {path}: {exc}") from exc
        asc, desc = _vertical_metrics(tt)
        name = tt["name"].getBestFullName() if "name" in tt else None
        font = TargetFont(
            path=path,
            font_number=font_number,
            ttfont=tt,
            units_per_em=upem,
            cmap=cmap,
            advances={g: m[0] for g, m in hmtx.items()},
            ascender=asc,
            descender=desc,
            name=_pdf_name(name or Path(path).stem),
        )
        _font_cache[key] = font
        return font


def _vertical_metrics(tt: TTFont) -> tuple[int, int]:
    os2 = tt.get("OS/2")
    if os2 is not None and (os2.sTypoAscender or os2.sTypoDescender):
        return int(os2.sTypoAscender), int(os2.sTypoDescender)
    hhea = tt["hhea"]
    return int(hhea.ascent), int(hhea.descent)


def _pdf_name(name: str) -> str:
    keep = "".join(c for c in name if c.isalnum() or c in "-_")
    return keep or "Font"


def font_search_dirs(font_dirs: Iterable[str] = ()) -> list[Path]:
    dirs = [Path(d).expanduser() for d in font_dirs]
    dirs.append(_data_dir())
    dirs.extend(Path(d).expanduser() for d in SYSTEM_FONT_DIRS)
    return dirs


def find_font_file(filename: str, font_dirs: Iterable[str] = ()) -> Path | None:
    for d in font_search_dirs(font_dirs):
        direct = d / filename
        if direct.is_file():
            return direct
        if d.is_dir() and d != _data_dir():
            for root, _, files in os.walk(d):
                if filename in files:
                    return Path(root) / filename
    return None


def candidates_for(script: str, overrides: dict[str, list[str]] | None = None) -> list[str]:
    table = script_font_table()
    names = list((overrides or {}).get(script, [])) + list(table["scripts"].get(script, []))
    return names + [n for n in table["fallback"] if n not in names]


def select_font(
    script: str,
    font_dirs: Iterable[str] = (),
    overrides: dict[str, list[str]] | None = None,
    font_path: str | None = None,
    downloader: Callable[[str], Path | None] | None = None,
) -> TargetFont:
    """Pick the first available font for ``script``.

    An explicit ``font_path`` wins. Otherwise the per-script list is tried in
    font dirs, the bundled data directory and system directories; if nothing
    is found and ``downloader`` is given it may fetch a candidate.
    """
    if font_path:
        return TargetFont.load(font_path)
    dirs = list(font_dirs)
    names = candidates_for(script, overrides)
    for name in names:
        path = find_font_file(name, dirs)
        if path is not None:
            return TargetFont.load(path)
    if downloader is not None:
        for name in names:
            path = downloader(name)
            if path is not None:
                return TargetFont.load(path)
    raise FontNotFound(f"no font found for script {script}; tried {', '.join(names)}")


def download_remote_fonts(
    filename: str,
    dest_dir: str | os.PathLike,
    urls: dict[str, str] | None = None,
    fetch: Callable[[str], bytes] | None = None,
) -> Path | None:
    """Fetch ``filename`` from a known URL into ``dest_dir``; off unless wired in."""
    table = dict(script_font_table().get("remote", {}))
    table.update(urls or {})
    url = table.get(filename)
    if not url:
        return None
    dest = Path(dest_dir).expanduser() / filename
    if dest.is_file():
        return dest
    if fetch is None:
        import httpx

        def fetch(u: str) -> bytes:
            resp = httpx.get(u, follow_redirects=True, timeout=120.0)
            resp.raise_for_status()
            return resp.content

    try:
        data = fetch(url)
    except Exception as exc:  # noqa: BLE001 - any network failure just means "not found"
        logger.warning("could not download %s: %s", url, exc)
        return None
    dest.parent.mkdir(parents=True, exist_ok=True)
    tmp = dest.with_suffix(dest.suffix + ".part")
    tmp.write_bytes(data)
    tmp.replace(dest)
    return dest


@dataclass
class FontSubset:
    data: bytes
    # codepoint -> glyph id in the subset (0 = .notdef)
    gids: dict[int, int]
    # glyph id -> advance in 1/1000 em
    widths: dict[int, float]
    num_glyphs: int
    notdef: set[int]
    is_cff: bool
    ascender: int
    descender: int
    units_per_em: int
    bbox: tuple[float, float, float, float]
    name: str

    def encode(self, text: str) -> bytes:
        return b"".join(self.gids.get(ord(c), 0).to_bytes(2, "big") for c in text)


def subset_font(font: TargetFont, used: set[int] | Iterable[int]) -> FontSubset:
    """Subset to the used codepoints (plus .notdef) with glyph ids renumbered."""
    used = set(used)
    if not used:
        raise FontSubsetError("empty usage set")
    present = sorted(cp for cp in used if cp in font.cmap)
    notdef = {cp for cp in used if cp not in font.cmap}
    try:
        tt = TTFont(font.path, fontNumber=font.font_number, recalcTimestamp=False, lazy=False)
        opts = ft_subset.Options()
        opts.retain_gids = False
        opts.notdef_outline = True
        opts.notdef_glyph = True
        opts.layout_features = []
        opts.name_IDs = [1, 2, 3, 4, 6]
        opts.name_languages = [0x409]
        opts.hinting = False
        opts.desubroutinize = True
        opts.glyph_names = False
        opts.drop_tables += ["DSIG", "FFTM", "GSUB", "GPOS", "GDEF", "kern", "vhea", "vmtx"]
        sub = ft_subset.Subsetter(opts)
        sub.populate(unicodes=present)
        sub.subset(tt)
        buf = io.BytesIO()
        tt.save(buf)
    except (TTLibError, KeyError, AssertionError, ValueError, TypeError) as exc:
        raise FontSubsetError(f"cannot subset {font.path}: {exc}") from exc
    data = buf.getvalue()
    out = TTFont(io.BytesIO(data), recalcTimestamp=False)
    cmap = out.getBestCmap() or {}
    order = out.getGlyphOrder()
    ids = {g: i for i, g in enumerate(order)}
    upem = out["head"].unitsPerEm
    gids = {cp: ids[cmap[cp]] for cp in present if cp in cmap}
    for cp in notdef:
        gids[cp] = 0
    widths = {i: out["hmtx"].metrics[g][0] * 1000.0 / upem for i, g in enumerate(order)}
    head = out["head"]
    scale = 1000.0 / upem
    tag = _subset_tag(font.name, present)
    return FontSubset(
        data=data,
        gids=gids,
        widths=widths,
        num_glyphs=len(order),
        notdef=notdef,
        is_cff="glyf" not in out,
        ascender=font.ascender,
        descender=font.descender,
        units_per_em=upem,
        bbox=(head.xMin * scale, head.yMin * scale, head.xMax * scale, head.yMax * scale),
        name=f"{tag}+{font.name}",
    )


def _subset_tag(name: str, codepoints: list[int]) -> str:
    digest = hashlib.sha256((name + ",".join(map(str, codepoints))).encode()).digest()
    return "".join(chr(ord("A") + b % 26) for b in digest[:6])
