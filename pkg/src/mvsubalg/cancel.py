"""Cooperative cancellation for long-running computations."""

from __future__ import annotations

import time


class Cancelled(Exception):
    """Raised by :meth:`CancellationToken.check` once cancelled."""


class CancellationToken:
    def __init__(self, timeout: float | None = None):
        self._deadline = None if timeout is None else time.monotonic() + timeout
        self._cancelled = False

    def cancel(self) -> None:
        self._cancelled = True

    @property
    def cancelled(self) -> bool:
        if not self._cancelled and self._deadline is not None and time.monotonic() > self._deadline:
            self._cancelled = True
        return self._cancelled

    def check(self) -> None:
        if self.cancelled:
            raise Cancelled("computation cancelled")


def check(token: CancellationToken | None) -> None:
    if token is not None:
        token.check()
