"""Stream filters for the supported PDF subset."""
from __future__ import annotations

import base64
import re
import zlib

from .objects import MalformedPdf, PdfError


class UnsupportedFilter(PdfError):
    pass


def flate_decode(data: bytes) -> bytes:
    try:
        return zlib.decompress(data)
    except zlib.error:
        # tolerate a missing/garbled adler32 trailer
        d = zlib.decompressobj()
        try:
            return d.decompress(data)
        except zlib.error as exc:
            raise MalformedPdf(f"FlateDecode: {exc}") from exc


def ascii_hex_decode(data: bytes) -> bytes:
    end = data.find(b">")
    if end >= 0:
        data = data[:end]
    digits = re.sub(rb"\s", b"", data)
    if len(digits) % 2:
        digits += b"0"
    try:
        return bytes.fromhex(digits.decode("ascii"))
    except ValueError as exc:
        raise MalformedPdf(f"ASCIIHexDecode: {exc}") from exc


def ascii85_decode(data: bytes) -> bytes:
    data = re.sub(rb"\s", b"", data)
    if data.startswith(b"<~"):
        data = data[2:]
    if not data.endswith(b"~>"):
        data += b"~>"
    try:
        return base64.a85decode(b"<~" + data, adobe=True)
    except ValueError as exc:
        raise MalformedPdf(f"ASCII85Decode: {exc}") from exc


def lzw_decode(data: bytes, early_change: int = 1) -> bytes:
    out = bytearray()
    table: list[bytes] = []

    def reset() -> None:
        table.clear()
        table.extend(bytes([i]) for i in range(256))
        table.extend((b"", b""))  # 256 clear, 257 EOD

    reset()
    code_len = 9
    bitbuf = 0
    nbits = 0
    prev: bytes | None = None
    for byte in data:
        bitbuf = (bitbuf << 8) | byte
        nbits += 8
        while nbits >= code_len:
            nbits -= code_len
            code = (bitbuf >> nbits) & ((1 << code_len) - 1)
            if code == 256:
                reset()
                code_len = 9
                prev = None
                continue
            if code == 257:
                return bytes(out)
            if prev is None:
                entry = table[code]
            elif code < len(table):
                entry = table[code]
                table.append(prev + entry[:1])
            elif code == len(table):
                entry = prev + prev[:1]
                table.append(entry)
            else:
                raise MalformedPdf("LZWDecode: bad code")
            out += entry
            prev = entry
            size = len(table) + early_change
            if size >= 2048:
                code_len = 12
            elif size >= 1024:
                code_len = 11
            elif size >= 512:
                code_len = 10
    return bytes(out)


def run_length_decode(data: bytes) -> bytes:
    out = bytearray()
    i = 0
    while i < len(data):
        n = data[i]
        if n == 128:
            break
        if n < 128:
            out += data[i + 1 : i + 2 + n]
            i += n + 2
        else:
            out += data[i + 1 : i + 2] * (257 - n)
            i += 2
    return bytes(out)


def apply_predictor(data: bytes, parms: dict) -> bytes:
    predictor = parms.get("Predictor", 1)
    if predictor == 1:
        return data
    colors = parms.get("Colors", 1)
    bpc = parms.get("BitsPerComponent", 8)
    columns = parms.get("Columns", 1)
    bpp = max(1, colors * bpc // 8)
    row_len = (colors * bpc * columns + 7) // 8
    if predictor == 2:
        if bpc != 8:
            raise UnsupportedFilter("TIFF predictor with bpc != 8")
        out = bytearray(data)
        for r in range(0, len(out), row_len):
            for i in range(r + bpp, min(r + row_len, len(out))):
                out[i] = (out[i] + out[i - bpp]) & 0xFF
        return bytes(out)
    if predictor < 10:
        raise UnsupportedFilter(f"predictor {predictor}")
    out = bytearray()
    prev = bytearray(row_len)
    stride = row_len + 1
    for r in range(0, len(data) - stride + 1, stride):
        ftype = data[r]
        row = bytearray(data[r + 1 : r + stride])
        if ftype == 1:
            for i in range(bpp, len(row)):
                row[i] = (row[i] + row[i - bpp]) & 0xFF
        elif ftype == 2:
            for i in range(len(row)):
                row[i] = (row[i] + prev[i]) & 0xFF
        elif ftype == 3:
            for i in range(len(row)):
                left = row[i - bpp] if i >= bpp else 0
                row[i] = (row[i] + ((left + prev[i]) >> 1)) & 0xFF
        elif ftype == 4:
            for i in range(len(row)):
                a = row[i - bpp] if i >= bpp else 0
                b = prev[i]
                c = prev[i - bpp] if i >= bpp else 0
                p = a + b - c
                pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                pred = a if pa <= pb and pa <= pc else (b if pb <= pc else c)
                row[i] = (row[i] + pred) & 0xFF
        elif ftype != 0:
            raise MalformedPdf(f"bad PNG filter type {ftype}")
        out += row
        prev = row
    return bytes(out)


_DECODERS = {
    "FlateDecode": flate_decode,
    "Fl": flate_decode,
    "ASCIIHexDecode": ascii_hex_decode,
    "AHx": ascii_hex_decode,
    "ASCII85Decode": ascii85_decode,
    "A85": ascii85_decode,
    "RunLengthDecode": run_length_decode,
    "RL": run_length_decode,
}


def decode(data: bytes, filters, parms) -> bytes:
    """Apply a filter chain; ``filters``/``parms`` are already-resolved values."""
    if filters is None:
        return data
    if not isinstance(filters, list):
        filters = [filters]
    if not isinstance(parms, list):
        parms = [parms] * len(filters)
    for name, p in zip(filters, parms + [None] * (len(filters) - len(parms))):
        p = p or {}
        if name in ("LZWDecode", "LZW"):
            data = lzw_decode(data, p.get("EarlyChange", 1))
        elif name in _DECODERS:
            data = _DECODERS[name](data)
        else:
            raise UnsupportedFilter(str(name))
        if name in ("FlateDecode", "Fl", "LZWDecode", "LZW"):
            data = apply_predictor(data, p)
    return data
