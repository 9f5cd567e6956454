"""Retry with exponential backoff and a sliding-window rate limiter."""
from __future__ import annotations

import collections
import math
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, TypeVar

from .errors import ServiceError

T = TypeVar("T")


@dataclass
class CallStats:
    """Counters updated by the middleware; safe to share across threads."""

    attempts: int = 0
    calls: int = 0
    cache_hits: int = 0
    retries: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def bump(self, name: str, n: int = 1) -> None:
        with self._lock:
            setattr(self, name, getattr(self, name) + n)


@dataclass
class RetryPolicy:
    """At most ``max_attempts`` tries; the k-th retry sleeps
    uniform(0, min(max_delay, base * factor**(k-1)))."""

    max_attempts: int = 3
    base: float = 1.0
    factor: float = 2.0
    max_delay: float = 30.0
    sleep: Callable[[float], None] = time.sleep
    rng: random.Random = field(default_factory=random.Random)

    def delay(self, retry_number: int) -> float:
        cap = min(self.max_delay, self.base * self.factor ** (retry_number - 1))
        return self.rng.uniform(0.0, cap)

    def run(self, fn: Callable[[], T], stats: CallStats | None = None) -> T:
        attempt = 0
        while True:
            attempt += 1
            if stats is not None:
                stats.bump("attempts")
            try:
                return fn()
            except ServiceError as exc:
                if not exc.transient or attempt >= self.max_attempts:
                    raise
            if stats is not None:
                stats.bump("retries")
            self.sleep(self.delay(attempt))


class RateLimiter:
    """Allows at most ceil(qps) call starts in any half-open 1-second window."""

    def __init__(
        self,
        qps: float | None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
        window: float = 1.0,
    ) -> None:
        self.capacity = math.ceil(qps) if qps and qps > 0 else 0
        self.clock = clock
        self.sleep = sleep
        self.window = window
        self._starts: collections.deque[float] = collections.deque()
        self._lock = threading.Lock()

    def acquire(self) -> float:
        """Block until a start is allowed; returns the start time."""
        if not self.capacity:
            return self.clock()
        with self._lock:
            while True:
                now = self.clock()
                while self._starts and now >= self._starts[0] + self.window:
                    self._starts.popleft()
                if len(self._starts) < self.capacity:
                    self._starts.append(now)
                    return now
                # a floor keeps float rounding from stalling just short of expiry
                self.sleep(max(self._starts[0] + self.window - now, 1e-6))
