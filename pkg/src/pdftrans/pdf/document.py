"""Cross-reference and object-level parsing of a PDF byte stream."""
from __future__ import annotations

import logging
import re
import threading

from . import filters
from .lexer import Lexer, parse_object
from .objects import (
    EmptyInput,
    EncryptedPdf,
    MalformedPdf,
    PdfError,
    Ref,
    Stream,
    TruncatedStream,
)

logger = logging.getLogger(__name__)

_HEADER = re.compile(rb"%PDF-(\d)\.(\d)")
_INHERITABLE = ("Resources", "MediaBox", "CropBox", "Rotate")


class PdfFile:
    """Random-access view of the objects in a PDF.

    Only the latest xref chain is consulted; damaged files are rejected
    rather than reconstructed.
    """

    def __init__(self, data: bytes) -> None:
        if not data:
            raise EmptyInput("empty input")
        self.data = bytes(data)
        m = _HEADER.search(self.data[:1024])
        if not m:
            raise MalformedPdf("missing %PDF- header")
        self.header_offset = m.start()
        self.version = f"{m.group(1).decode()}.{m.group(2).decode()}"
        self.warnings: list[str] = []
        # num -> (type, a, b): type 1 = (offset, gen), type 2 = (objstm, index)
        self.xref: dict[int, tuple[int, int, int]] = {}
        self.trailer: dict = {}
        self._cache: dict[int, object] = {}
        self._objstm_cache: dict[int, list] = {}
        self._lock = threading.RLock()
        self._load_xref()
        if "Encrypt" in self.trailer:
            raise EncryptedPdf("encrypted documents are not supported")
        if "Root" not in self.trailer:
            raise MalformedPdf("trailer has no /Root")

    # -- xref -------------------------------------------------------------

    def _find_startxref(self) -> int:
        tail = self.data[-2048:]
        idx = tail.rfind(b"startxref")
        if idx < 0:
            raise MalformedPdf("startxref not found")
        m = re.match(rb"startxref\s+(\d+)", tail[idx:])
        if not m:
            raise MalformedPdf("malformed startxref")
        return int(m.group(1))

    def _load_xref(self) -> None:
        offset = self._find_startxref()
        seen: set[int] = set()
        first = True
        while offset is not None:
            if offset in seen:
                raise MalformedPdf("xref /Prev loop")
            seen.add(offset)
            trailer = self._read_xref_section(self._fix_offset(offset))
            if first:
                self.trailer = dict(trailer)
                first = False
            else:
                for k, v in trailer.items():
                    self.trailer.setdefault(k, v)
            if "XRefStm" in trailer:
                self._read_xref_section(self._fix_offset(trailer["XRefStm"]))
            prev = trailer.get("Prev")
            offset = prev if isinstance(prev, int) else None

    def _fix_offset(self, offset: int) -> int:
        if not 0 <= offset < len(self.data):
            raise MalformedPdf(f"xref offset {offset} out of range")
        return offset

    def _read_xref_section(self, offset: int) -> dict:
        lex = Lexer(self.data, offset)
        lex.skip_ws()
        if self.data.startswith(b"xref", lex.pos):
            return self._read_xref_table(lex)
        return self._read_xref_stream(lex)

    def _read_xref_table(self, lex: Lexer) -> dict:
        lex.pos += 4
        data = self.data
        while True:
            lex.skip_ws()
            if data.startswith(b"trailer", lex.pos):
                lex.pos += 7
                break
            m = re.compile(rb"(\d+)\s+(\d+)").match(data, lex.pos)
            if not m:
                raise MalformedPdf(f"bad xref subsection at {lex.pos}")
            start, count = int(m.group(1)), int(m.group(2))
            lex.pos = m.end()
            entry = re.compile(rb"\s*(\d{1,10})\s+(\d{1,5})\s+([nf])")
            for i in range(count):
                e = entry.match(data, lex.pos)
                if not e:
                    raise MalformedPdf(f"bad xref entry at {lex.pos}")
                lex.pos = e.end()
                num = start + i
                if num in self.xref:
                    continue
                if e.group(3) == b"n":
                    self.xref[num] = (1, int(e.group(1)), int(e.group(2)))
                else:
                    self.xref[num] = (0, 0, 0)
        trailer = parse_object(lex)
        if not isinstance(trailer, dict):
            raise MalformedPdf("trailer is not a dictionary")
        return trailer

    def _read_xref_stream(self, lex: Lexer) -> dict:
        _, stream = self._parse_indirect_at(lex.pos)
        if not isinstance(stream, Stream) or stream.get("Type") != "XRef":
            raise MalformedPdf("startxref does not point to an xref table or stream")
        body = self.decode_stream(stream)
        widths = stream["W"]
        if len(widths) != 3:
            raise MalformedPdf("xref stream /W must have 3 entries")
        size = stream.get("Size", 0)
        index = stream.get("Index", [0, size])
        rec = sum(widths)
        pos = 0
        for start, count in zip(index[::2], index[1::2]):
            for i in range(count):
                if pos + rec > len(body):
                    raise MalformedPdf("xref stream truncated")
                fields = []
                p = pos
                for w in widths:
                    v = 0
                    for b in body[p : p + w]:
                        v = (v << 8) | b
                    fields.append(v)
                    p += w
                pos += rec
                kind = fields[0] if widths[0] else 1
                num = start + i
                if num in self.xref:
                    continue
                if kind == 1:
                    self.xref[num] = (1, fields[1], fields[2])
                elif kind == 2:
                    self.xref[num] = (2, fields[1], fields[2])
                else:
                    self.xref[num] = (0, 0, 0)
        return stream.attrs

    # -- objects ----------------------------------------------------------

    def _parse_indirect_at(self, offset: int) -> tuple[int, object]:
        lex = Lexer(self.data, offset)
        try:
            num = lex.next_token()
            gen = lex.next_token()
            kw = lex.next_token()
        except EOFError:
            raise MalformedPdf(f"truncated object at offset {offset}") from None
        if not isinstance(num, int) or not isinstance(gen, int) or kw != "obj":
            raise MalformedPdf(f"no object header at offset {offset}")
        try:
            obj = parse_object(lex)
        except TruncatedStream as exc:
            raise MalformedPdf(str(exc)) from exc
        save = lex.pos
        try:
            tok = lex.next_token()
        except EOFError:
            tok = None
        if tok == "stream" and isinstance(obj, dict):
            pos = lex.pos
            if self.data[pos : pos + 2] == b"\r\n":
                pos += 2
            elif self.data[pos : pos + 1] in (b"\n", b"\r"):
                pos += 1
            length = obj.get("Length")
            if isinstance(length, Ref):
                length = self.resolve(length)
            end = None
            if isinstance(length, int) and 0 <= length and pos + length <= len(self.data):
                tail = self.data[pos + length : pos + length + 32]
                if re.match(rb"\s*endstream", tail):
                    end = pos + length
            if end is None:
                idx = self.data.find(b"endstream", pos)
                if idx < 0:
                    raise MalformedPdf(f"unterminated stream in object {num}")
                end = idx
                while end > pos and self.data[end - 1] in b"\r\n":
                    end -= 1
                self.warnings.append(f"object {num}: /Length mismatch, used endstream marker")
            return num, Stream(obj, self.data[pos:end])
        lex.pos = save
        return num, obj

    def _load_objstm(self, stm_num: int) -> list:
        cached = self._objstm_cache.get(stm_num)
        if cached is not None:
            return cached
        stm = self.get(stm_num)
        if not isinstance(stm, Stream):
            raise MalformedPdf(f"object stream {stm_num} is not a stream")
        body = self.decode_stream(stm)
        n = stm["N"]
        first = stm["First"]
        lex = Lexer(body)
        header = [lex.next_token() for _ in range(2 * n)]
        objs = []
        for i in range(n):
            lex.pos = first + header[2 * i + 1]
            objs.append((header[2 * i], parse_object(lex)))
        self._objstm_cache[stm_num] = objs
        return objs

    def get(self, num: int):
        with self._lock:
            if num in self._cache:
                return self._cache[num]
            entry = self.xref.get(num)
            if entry is None or entry[0] == 0:
                obj = None
            elif entry[0] == 1:
                found, obj = self._parse_indirect_at(self._fix_offset(entry[1]))
                if found != num:
                    raise MalformedPdf(f"xref points object {num} at object {found}")
            else:
                objs = self._load_objstm(entry[1])
                idx = entry[2]
                if idx >= len(objs) or objs[idx][0] != num:
                    match = [o for n, o in objs if n == num]
                    if not match:
                        raise MalformedPdf(f"object {num} missing from object stream")
                    obj = match[0]
                else:
                    obj = objs[idx][1]
            self._cache[num] = obj
            return obj

    def resolve(self, obj):
        depth = 0
        while isinstance(obj, Ref):
            obj = self.get(obj.num)
            depth += 1
            if depth > 32:
                raise MalformedPdf("reference chain too deep")
        return obj

    def decode_stream(self, stream: Stream) -> bytes:
        if stream._decoded is not None:
            return stream._decoded
        flt = self.resolve(stream.get("Filter"))
        parms = self.resolve(stream.get("DecodeParms"))
        if isinstance(flt, list):
            flt = [self.resolve(f) for f in flt]
        if isinstance(parms, list):
            parms = [self.resolve(p) for p in parms]
        if isinstance(parms, dict):
            parms = {k: self.resolve(v) for k, v in parms.items()}
        stream._decoded = filters.decode(stream.raw, flt, parms)
        return stream._decoded

    # -- page tree --------------------------------------------------------

    @property
    def catalog(self) -> dict:
        root = self.resolve(self.trailer["Root"])
        if not isinstance(root, dict):
            raise MalformedPdf("catalog is not a dictionary")
        return root

    def pages(self) -> list[tuple[Ref | None, dict]]:
        """Return (ref, page dict with inherited attributes merged) in order."""
        out: list[tuple[Ref | None, dict]] = []
        root = self.catalog.get("Pages")
        if root is None:
            raise MalformedPdf("catalog has no /Pages")
        seen: set[int] = set()

        def walk(ref, inherited: dict) -> None:
            node = self.resolve(ref)
            if isinstance(ref, Ref):
                if ref.num in seen:
                    raise MalformedPdf("page tree cycle")
                seen.add(ref.num)
            if not isinstance(node, dict):
                raise MalformedPdf("page tree node is not a dictionary")
            attrs = dict(inherited)
            for key in _INHERITABLE:
                if key in node:
                    attrs[key] = node[key]
            kind = node.get("Type")
            if kind == "Pages" or (kind is None and "Kids" in node):
                for kid in self.resolve(node.get("Kids", [])):
                    walk(kid, attrs)
            else:
                page = dict(node)
                for key, value in attrs.items():
                    page.setdefault(key, value)
                out.append((ref if isinstance(ref, Ref) else None, page))

        walk(root, {})
        if not out:
            raise MalformedPdf("document has no pages")
        return out

    def page_content(self, page: dict) -> bytes:
        contents = self.resolve(page.get("Contents"))
        if contents is None:
            return b""
        if isinstance(contents, Stream):
            contents = [contents]
        parts = []
        for c in contents:
            c = self.resolve(c)
            if not isinstance(c, Stream):
                raise MalformedPdf("page /Contents entry is not a stream")
            parts.append(self.decode_stream(c))
        return b"\n".join(parts)


__all__ = ["PdfFile", "PdfError"]
