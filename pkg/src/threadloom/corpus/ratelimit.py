"""Token-bucket rate limiting for outbound provider calls."""

from __future__ import annotations

import threading
import time


class TokenBucket:
    """Blocking token bucket, safe to share across worker threads.

    Args:
        rate: sustained requests per second.
        burst: bucket capacity; short bursts up to this size pass untouched.
    """

    def __init__(self, rate: float = 5.0, burst: int = 5):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self.burst = max(1, burst)
        self._tokens = float(self.burst)
        self._updated = time.monotonic()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        """Block until a token is available, then consume it."""
        while True:
            with self._lock:
                now = time.monotonic()
                self._tokens = min(
                    float(self.burst), self._tokens + (now - self._updated) * self.rate
                )
                self._updated = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            time.sleep(wait)


class NullLimiter:
    """Limiter stand-in that never blocks; used by offline and replay runs."""

    def acquire(self) -> None:
        return None
