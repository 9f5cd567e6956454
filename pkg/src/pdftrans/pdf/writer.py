"""Serialize object graphs into a fresh PDF file."""
from __future__ import annotations

import hashlib
import zlib

from .document import PdfFile
from .objects import Name, Ref, Stream, serialize


class PdfWriter:
    """Accumulates indirect objects and writes a classic-xref PDF.

    Output is a pure function of the objects added, so identical inputs
    give byte-identical files.
    """

    def __init__(self, version: str = "1.7") -> None:
        self.version = version
        self.objects: list[object] = [None]  # object 0 is the free head

    def reserve(self) -> Ref:
        self.objects.append(None)
        return Ref(len(self.objects) - 1)

    def add(self, obj) -> Ref:
        self.objects.append(obj)
        return Ref(len(self.objects) - 1)

    def set(self, ref: Ref, obj) -> None:
        self.objects[ref.num] = obj

    def add_stream(self, data: bytes, attrs: dict | None = None, compress: bool = True) -> Ref:
        attrs = dict(attrs or {})
        if compress:
            data = zlib.compress(data, 6)
            attrs["Filter"] = Name("FlateDecode")
        return self.add(Stream(attrs, data))

    def write(self, root: Ref, info: Ref | None = None) -> bytes:
        out = bytearray(b"%PDF-" + self.version.encode() + b"\n%\xe2\xe3\xcf\xd3\n")
        offsets = [0] * len(self.objects)
        for num in range(1, len(self.objects)):
            obj = self.objects[num]
            offsets[num] = len(out)
            out += b"%d 0 obj\n" % num
            if isinstance(obj, Stream):
                attrs = dict(obj.attrs)
                attrs["Length"] = len(obj.raw)
                out += serialize(attrs) + b"\nstream\n" + obj.raw + b"\nendstream"
            else:
                out += serialize(obj)
            out += b"\nendobj\n"
        xref_at = len(out)
        out += b"xref\n0 %d\n" % len(self.objects)
        out += b"0000000000 65535 f \n"
        for num in range(1, len(self.objects)):
            out += b"%010d 00000 n \n" % offsets[num]
        digest = hashlib.md5(bytes(out)).digest()
        trailer = {"Size": len(self.objects), "Root": root, "ID": [digest, digest]}
        if info is not None:
            trailer["Info"] = info
        out += b"trailer\n" + serialize(trailer) + b"\nstartxref\n%d\n%%%%EOF\n" % xref_at
        return bytes(out)


class ObjectCopier:
    """Deep-copies objects from a source file into a writer, once each."""

    def __init__(self, source: PdfFile, writer: PdfWriter) -> None:
        self.source = source
        self.writer = writer
        self.memo: dict[int, Ref] = {}

    def premap(self, src: Ref, dst: Ref) -> None:
        self.memo[src.num] = dst

    def copy(self, obj, skip_keys: frozenset[str] = frozenset()):
        if isinstance(obj, Ref):
            if obj.num in self.memo:
                return self.memo[obj.num]
            dst = self.writer.reserve()
            self.memo[obj.num] = dst
            target = self.source.get(obj.num)
            self.writer.set(dst, self.copy(target))
            return dst
        if isinstance(obj, Stream):
            attrs = {k: self.copy(v) for k, v in obj.attrs.items() if k != "Length"}
            return Stream(attrs, obj.raw)
        if isinstance(obj, dict):
            return {k: self.copy(v) for k, v in obj.items() if k not in skip_keys}
        if isinstance(obj, list):
            return [self.copy(v) for v in obj]
        return obj


def build_page_tree(writer: PdfWriter, page_refs: list[Ref], pages_ref: Ref) -> Ref:
    """Create /Pages and /Catalog objects; returns the catalog ref."""
    writer.set(pages_ref, {"Type": Name("Pages"), "Kids": list(page_refs), "Count": len(page_refs)})
    return writer.add({"Type": Name("Catalog"), "Pages": pages_ref})
