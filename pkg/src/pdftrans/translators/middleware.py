"""Cache, rate limiting, retries and single-flight around a translator."""
from __future__ import annotations

import logging
import threading

from .base import BaseTranslator, TranslateRequest
from .cache import TranslationCache, cache_key
from .retry import CallStats, RateLimiter, RetryPolicy

logger = logging.getLogger(__name__)


class TranslationClient:
    def __init__(
        self,
        translator: BaseTranslator,
        cache: TranslationCache | None = None,
        limiter: RateLimiter | None = None,
        retry: RetryPolicy | None = None,
        ignore_cache: bool = False,
        prompt_digest: str = "",
        stats: CallStats | None = None,
    ) -> None:
        self.translator = translator
        self.cache = cache if cache is not None else TranslationCache(None)
        self.limiter = limiter
        self.retry = retry or RetryPolicy()
        self.ignore_cache = ignore_cache
        self.prompt_digest = prompt_digest
        self.stats = stats or CallStats()
        self._flight = threading.Lock() if translator.descriptor.single_flight else None
        # key -> [lock, waiters] for requests currently being translated
        self._pending: dict[str, list] = {}
        self._pending_lock = threading.Lock()
        if getattr(translator, "stats", None) is None and translator.descriptor.handles_retry:
            translator.stats = self.stats

    def key(self, req: TranslateRequest) -> str:
        return cache_key(
            self.translator.descriptor.name,
            {**self.translator.cache_options(), **dict(req.options)},
            req.lang_in,
            req.lang_out,
            self.prompt_digest,
            req.text,
        )

    def _call(self, req: TranslateRequest) -> str:
        if self.limiter is not None:
            self.limiter.acquire()
        if self._flight is not None:
            with self._flight:
                return self.translator.translate(req)
        return self.translator.translate(req)

    def translate(self, req: TranslateRequest, refresh: bool = False) -> str:
        """Cached translation; ``refresh`` skips the lookup but still stores.

        Concurrent requests for the same key wait for the first one instead of
        calling the service again, so call counts do not depend on timing.
        """
        key = self.key(req)
        if self.ignore_cache or refresh:
            return self._translate(req, key, skip_lookup=True)
        with self._pending_lock:
            entry = self._pending.setdefault(key, [threading.Lock(), 0])
            entry[1] += 1
        try:
            with entry[0]:
                return self._translate(req, key, skip_lookup=False)
        finally:
            with self._pending_lock:
                entry[1] -= 1
                if entry[1] == 0:
                    del self._pending[key]

    def _translate(self, req: TranslateRequest, key: str, skip_lookup: bool) -> str:
        hit = self.cache.get(key, skip_lookup)
        if hit is not None:
            self.stats.bump("cache_hits")
            return hit
        self.stats.bump("calls")
        if self.translator.descriptor.handles_retry:
            result = self._call(req)
        else:
            result = self.retry.run(lambda: self._call(req), self.stats)
        self.cache.put(key, result)
        return result
