"""Byte-level tokenizer shared by the object parser and content streams."""
from __future__ import annotations

import re

from .objects import Keyword, MalformedPdf, Name, Ref, TruncatedStream

WHITESPACE = b" \t\r\n\f\x00"
DELIMITERS = b"()<>[]{}/%"
_END = frozenset(WHITESPACE + DELIMITERS)
_NUMBER = re.compile(rb"[+-]?(?:\d+\.?\d*|\.\d+)$")
_ESCAPES = {
    ord("n"): b"\n",
    ord("r"): b"\r",
    ord("t"): b"\t",
    ord("b"): b"\b",
    ord("f"): b"\f",
    ord("("): b"(",
    ord(")"): b")",
    ord("\\"): b"\\",
}


class _Mark:
    """Opening delimiter placeholder on the parse stack."""

    def __init__(self, kind: str) -> None:
        self.kind = kind


ARRAY_OPEN = _Mark("[")
DICT_OPEN = _Mark("<<")


class Lexer:
    def __init__(self, data: bytes, pos: int = 0) -> None:
        self.data = data
        self.pos = pos

    def skip_ws(self) -> None:
        data, n = self.data, len(self.data)
        pos = self.pos
        while pos < n:
            c = data[pos]
            if c in WHITESPACE:
                pos += 1
            elif c == 0x25:  # % comment
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                break
        self.pos = pos

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.data)

    def next_token(self):
        """Return the next token, or raise EOFError.

        Tokens are numbers, bytes (strings), Name, Keyword, or one of the
        delimiter strings "[", "]", "<<", ">>".
        """
        self.skip_ws()
        data, pos = self.data, self.pos
        if pos >= len(data):
            raise EOFError
        c = data[pos]
        if c == 0x2F:  # /
            end = pos + 1
            while end < len(data) and data[end] not in _END:
                end += 1
            self.pos = end
            raw = data[pos + 1 : end]
            if b"#" in raw:
                raw = re.sub(rb"#([0-9A-Fa-f]{2})", lambda m: bytes([int(m.group(1), 16)]), raw)
            return Name(raw.decode("utf-8", "surrogateescape"))
        if c == 0x28:  # (
            return self._literal_string()
        if c == 0x3C:  # <
            if data[pos + 1 : pos + 2] == b"<":
                self.pos = pos + 2
                return "<<"
            return self._hex_string()
        if c == 0x3E:  # >
            if data[pos + 1 : pos + 2] == b">":
                self.pos = pos + 2
                return ">>"
            self.pos = pos + 1
            raise MalformedPdf(f"stray '>' at offset {pos}")
        if c in b"[]{}":
            self.pos = pos + 1
            return chr(c)
        if c == 0x29:
            self.pos = pos + 1
            raise MalformedPdf(f"stray ')' at offset {pos}")
        end = pos
        while end < len(data) and data[end] not in _END:
            end += 1
        self.pos = end
        word = data[pos:end]
        if _NUMBER.match(word):
            if b"." in word:
                return float(word)
            return int(word)
        return Keyword(word.decode("latin-1"))

    def _literal_string(self) -> bytes:
        data = self.data
        pos = self.pos + 1
        depth = 1
        out = bytearray()
        n = len(data)
        while pos < n:
            c = data[pos]
            if c == 0x5C:  # backslash
                pos += 1
                if pos >= n:
                    break
                e = data[pos]
                if e in _ESCAPES:
                    out += _ESCAPES[e]
                    pos += 1
                elif 0x30 <= e <= 0x37:
                    digits = data[pos : pos + 3]
                    m = re.match(rb"[0-7]{1,3}", digits)
                    out.append(int(m.group(), 8) & 0xFF)
                    pos += len(m.group())
                elif e == 0x0D:
                    pos += 1
                    if pos < n and data[pos] == 0x0A:
                        pos += 1
                elif e == 0x0A:
                    pos += 1
                else:
                    out.append(e)
                    pos += 1
                continue
            if c == 0x28:
                depth += 1
            elif c == 0x29:
                depth -= 1
                if depth == 0:
                    self.pos = pos + 1
                    return bytes(out)
            out.append(c)
            pos += 1
        raise TruncatedStream("unterminated literal string")

    def _hex_string(self) -> bytes:
        end = self.data.find(b">", self.pos)
        if end < 0:
            raise TruncatedStream("unterminated hex string")
        digits = re.sub(rb"\s", b"", self.data[self.pos + 1 : end])
        self.pos = end + 1
        if not re.fullmatch(rb"[0-9A-Fa-f]*", digits):
            raise MalformedPdf("invalid hex string")
        if len(digits) % 2:
            digits += b"0"
        return bytes.fromhex(digits.decode())


def parse_object(lex: Lexer, *, allow_refs: bool = True):
    """Parse one complete direct object starting at the lexer position.

    Integer pairs followed by ``R`` become :class:`Ref` when ``allow_refs``.
    """
    stack: list = []
    while True:
        try:
            tok = lex.next_token()
        except EOFError:
            raise TruncatedStream("object truncated at end of data") from None
        if tok == "[":
            stack.append(ARRAY_OPEN)
            continue
        if tok == "<<":
            stack.append(DICT_OPEN)
            continue
        if tok == "]":
            value = _close(stack, ARRAY_OPEN)
            value = list(value)
        elif tok == ">>":
            items = _close(stack, DICT_OPEN)
            if len(items) % 2:
                raise MalformedPdf("dictionary with odd number of items")
            value = {}
            for k, v in zip(items[::2], items[1::2]):
                if not isinstance(k, Name):
                    raise MalformedPdf(f"dictionary key {k!r} is not a name")
                value[str(k)] = v
        elif isinstance(tok, Keyword):
            if tok == "R" and allow_refs:
                if len(stack) < 2 or not isinstance(stack[-1], int) or not isinstance(stack[-2], int):
                    raise MalformedPdf("dangling R")
                gen = stack.pop()
                num = stack.pop()
                value = Ref(num, gen)
            elif tok == "true":
                value = True
            elif tok == "false":
                value = False
            elif tok == "null":
                value = None
            elif not stack:
                return tok
            else:
                raise MalformedPdf(f"unexpected keyword {tok!r}")
        else:
            value = tok
        if not stack:
            if allow_refs and isinstance(value, int) and not isinstance(value, bool):
                # could be the start of "n g R"
                save = lex.pos
                try:
                    t2 = lex.next_token()
                    t3 = lex.next_token()
                except (EOFError, MalformedPdf):
                    lex.pos = save
                    return value
                if isinstance(t2, int) and t3 == "R":
                    return Ref(value, t2)
                lex.pos = save
            return value
        stack.append(value)


def _close(stack: list, mark: _Mark) -> list:
    for i in range(len(stack) - 1, -1, -1):
        if stack[i] is mark:
            items = stack[i + 1 :]
            del stack[i:]
            return items
        if isinstance(stack[i], _Mark):
            break
    raise MalformedPdf(f"unbalanced {mark.kind}")
