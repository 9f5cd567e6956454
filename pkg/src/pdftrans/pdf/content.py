"""Content-stream tokenization into operators with byte spans."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .lexer import Lexer, parse_object
from .objects import Keyword, MalformedPdf, TruncatedStream, serialize

logger = logging.getLogger(__name__)

KNOWN_OPERATORS = frozenset(
    """
    b B b* B* BDC BI BMC BT BX c cm CS cs d d0 d1 Do DP EI EMC ET EX f F f* G g gs
    h i ID j J K k l m M MP n q Q re RG rg ri s S SC sc SCN scn sh T* Tc Td TD Tf
    Tj TJ TL Tm Tr Ts Tw Tz v w W W* y ' "
    """.split()
)
TEXT_SHOW_OPERATORS = frozenset({"Tj", "TJ", "'", '"'})
TEXT_OPERATORS = frozenset(
    {"BT", "ET", "Tc", "Tw", "Tz", "TL", "Tf", "Tr", "Ts", "Td", "TD", "Tm", "T*"}
    | TEXT_SHOW_OPERATORS
)
OPAQUE = "<opaque>"
INLINE_IMAGE = "BI"


@dataclass
class Operator:
    name: str
    operands: list = field(default_factory=list)
    byte_span: tuple[int, int] = (0, 0)
    # the unknown keyword (for opaque operators) or the raw inline image
    raw: bytes = b""

    @property
    def opaque(self) -> bool:
        return self.name == OPAQUE

    def __repr__(self) -> str:
        if self.opaque:
            return f"Operator(opaque {self.raw!r})"
        return f"Operator({self.name} {self.operands!r})"


def tokenize_content_stream(data: bytes, warnings: list[str] | None = None) -> list[Operator]:
    """Split a decoded content stream into operators.

    Unknown keywords become opaque operators carrying the keyword bytes; the
    operands collected before them stay attached.
    """
    lex = Lexer(data)
    ops: list[Operator] = []
    operands: list = []
    start: int | None = None

    def warn(msg: str) -> None:
        logger.debug(msg)
        if warnings is not None:
            warnings.append(msg)

    while True:
        lex.skip_ws()
        if lex.pos >= len(data):
            break
        here = lex.pos
        if start is None:
            start = here
        try:
            obj = parse_object(lex, allow_refs=False)
        except (TruncatedStream, MalformedPdf) as exc:
            if isinstance(exc, TruncatedStream):
                raise
            raise TruncatedStream(f"bad operand at offset {here}: {exc}") from exc
        if isinstance(obj, Keyword):
            name = str(obj)
            if name == "BI":
                op = _inline_image(data, lex, start)
                ops.append(op)
            elif name in KNOWN_OPERATORS:
                ops.append(Operator(name, operands, (start, lex.pos)))
            else:
                warn(f"unknown content operator {name!r} at offset {here}")
                ops.append(Operator(OPAQUE, operands, (start, lex.pos), raw=name.encode("latin-1")))
            operands = []
            start = None
        else:
            operands.append(obj)
    if operands:
        raise TruncatedStream(f"{len(operands)} operand(s) without operator at end of stream")
    return ops


_EI = re.compile(rb"(?<=[\s])EI(?=[\s]|$)")


def _inline_image(data: bytes, lex: Lexer, start: int) -> Operator:
    attrs = []
    while True:
        lex.skip_ws()
        if data.startswith(b"ID", lex.pos):
            lex.pos += 2
            break
        if lex.pos >= len(data):
            raise TruncatedStream("inline image without ID")
        attrs.append(parse_object(lex, allow_refs=False))
    body_start = lex.pos + 1
    m = _EI.search(data, body_start)
    if not m:
        raise TruncatedStream("inline image without EI")
    lex.pos = m.end()
    return Operator(INLINE_IMAGE, attrs, (start, lex.pos), raw=data[start : lex.pos])


def serialize_operator(op: Operator) -> bytes:
    if op.name == INLINE_IMAGE:
        return op.raw
    parts = [serialize(o) for o in op.operands]
    parts.append(op.raw if op.opaque else op.name.encode("latin-1"))
    return b" ".join(parts)


def serialize_operators(ops: list[Operator]) -> bytes:
    return b"\n".join(serialize_operator(op) for op in ops) + b"\n"
