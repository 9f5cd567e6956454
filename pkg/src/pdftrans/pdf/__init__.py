"""Reading and writing the supported PDF subset."""
from .content import Operator, tokenize_content_stream
from .extract import extract_text_runs
from .fonts import decode_string
from .objects import EmptyInput, EncryptedPdf, MalformedPdf, PdfError, TruncatedStream
from .reader import parse_document

__all__ = [
    "EmptyInput",
    "EncryptedPdf",
    "MalformedPdf",
    "Operator",
    "PdfError",
    "TruncatedStream",
    "decode_string",
    "extract_text_runs",
    "parse_document",
    "tokenize_content_stream",
]
