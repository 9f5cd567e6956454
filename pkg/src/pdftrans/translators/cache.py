"""Persistent translation cache: an append-only JSON-lines log."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from pathlib import Path
from typing import Any, Mapping

from .errors import CacheIoError

logger = logging.getLogger(__name__)


def cache_key(
    service: str,
    options: Mapping[str, Any],
    lang_in: str,
    lang_out: str,
    prompt_digest: str,
    text: str,
) -> str:
    """SHA-256 over a canonical JSON encoding of every input that can change output."""
    payload = json.dumps(
        {
            "service": service,
            "options": options,
            "lang_in": lang_in,
            "lang_out": lang_out,
            "prompt": prompt_digest,
            "text": text,
        },
        sort_keys=True,
        ensure_ascii=False,
        separators=(",", ":"),
        default=str,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def default_cache_path() -> Path:
    root = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(root) / "pdftrans" / "translations.jsonl"


class TranslationCache:
    """Key/value store; ``path=None`` keeps everything in memory.

    Each put appends one line and fsyncs. A torn final line left by a crash
    is cut off on open. Any I/O failure disables persistence with a warning
    instead of failing the translation.
    """

    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path is not None else None
        self._index: dict[str, str] = {}
        self._lock = threading.Lock()
        self.degraded = False
        if self.path is not None:
            try:
                self._load()
            except CacheIoError as exc:
                self._degrade(exc)

    def _degrade(self, exc: Exception) -> None:
        logger.warning("translation cache disabled: %s", exc)
        self.degraded = True

    def _load(self) -> None:
        assert self.path is not None
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            if not self.path.exists():
                return
            data = self.path.read_bytes()
        except OSError as exc:
            raise CacheIoError(f"cannot read {self.path}: {exc}") from exc
        end = data.rfind(b"\n") + 1
        if end < len(data):
            logger.warning("cache %s ends with a partial record; dropping it", self.path)
            try:
                with open(self.path, "r+b") as fh:
                    fh.truncate(end)
            except OSError as exc:
                raise CacheIoError(f"cannot repair {self.path}: {exc}") from exc
        for lineno, line in enumerate(data[:end].splitlines(), 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                self._index[str(rec["k"])] = str(rec["v"])
            except (ValueError, KeyError, TypeError):
                logger.warning("cache %s: skipping bad record on line %d", self.path, lineno)

    def get(self, key: str, ignore_cache: bool = False) -> str | None:
        if ignore_cache:
            return None
        with self._lock:
            return self._index.get(key)

    def put(self, key: str, value: str) -> None:
        with self._lock:
            self._index[key] = value
            if self.path is None or self.degraded:
                return
            line = json.dumps({"k": key, "v": value}, ensure_ascii=False) + "\n"
            try:
                with open(self.path, "ab") as fh:
                    fh.write(line.encode("utf-8"))
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                self._degrade(CacheIoError(f"cannot append to {self.path}: {exc}"))

    def __len__(self) -> int:
        return len(self._index)
