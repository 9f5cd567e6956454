"""PDF object types and serialization."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


class PdfError(Exception):
    pass


class MalformedPdf(PdfError):
    pass


class EncryptedPdf(PdfError):
    pass


class EmptyInput(PdfError):
    pass


class TruncatedStream(PdfError):
    pass


class Name(str):
    """A PDF name object; the value excludes the leading slash."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"/{str(self)}"


class Keyword(str):
    """A bare content-stream operator or object-level keyword."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"Keyword({str(self)})"


@dataclass(frozen=True, slots=True)
class Ref:
    num: int
    gen: int = 0

    def __repr__(self) -> str:
        return f"{self.num} {self.gen} R"


@dataclass
class Stream:
    attrs: dict
    raw: bytes
    _decoded: bytes | None = field(default=None, repr=False)

    def __getitem__(self, key: str):
        return self.attrs[key]

    def get(self, key: str, default=None):
        return self.attrs.get(key, default)


_NAME_REGULAR = frozenset(
    c for c in range(0x21, 0x7F) if chr(c) not in "()<>[]{}/%#"
)


def _name_bytes(name: str) -> bytes:
    out = bytearray(b"/")
    for c in name.encode("utf-8"):
        if c in _NAME_REGULAR:
            out.append(c)
        else:
            out += b"#%02X" % c
    return bytes(out)


def _string_bytes(s: bytes) -> bytes:
    if sum(1 for c in s if c < 0x20 or c > 0x7E) > len(s) // 4:
        return b"<" + s.hex().upper().encode() + b">"
    out = bytearray(b"(")
    for c in s:
        if c in b"()\\":
            out += b"\\" + bytes([c])
        elif c == 0x0A:
            out += b"\\n"
        elif c == 0x0D:
            out += b"\\r"
        elif c < 0x20 or c > 0x7E:
            out += b"\\%03o" % c
        else:
            out.append(c)
    out += b")"
    return bytes(out)


def format_number(v: float) -> bytes:
    if isinstance(v, bool):
        return b"true" if v else b"false"
    if isinstance(v, int):
        return str(v).encode()
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize {v!r}")
    if v == int(v) and abs(v) < 1e15:
        return str(int(v)).encode()
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s.encode()


def serialize(obj) -> bytes:
    """Serialize a direct object (streams must be written by the writer)."""
    if obj is None:
        return b"null"
    if isinstance(obj, bool):
        return b"true" if obj else b"false"
    if isinstance(obj, Name):
        return _name_bytes(obj)
    if isinstance(obj, Keyword):
        return str(obj).encode("latin-1")
    if isinstance(obj, (int, float)):
        return format_number(obj)
    if isinstance(obj, (bytes, bytearray)):
        return _string_bytes(bytes(obj))
    if isinstance(obj, Ref):
        return b"%d %d R" % (obj.num, obj.gen)
    if isinstance(obj, (list, tuple)):
        return b"[" + b" ".join(serialize(o) for o in obj) + b"]"
    if isinstance(obj, dict):
        parts = [b"<<"]
        for k, v in obj.items():
            parts.append(_name_bytes(k) + b" " + serialize(v))
        parts.append(b">>")
        return b" ".join(parts)
    if isinstance(obj, Stream):
        raise TypeError("streams must be indirect objects")
    raise TypeError(f"cannot serialize {type(obj).__name__}")
