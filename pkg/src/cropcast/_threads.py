"""BLAS thread pinning.

Every matrix in this library is small enough that multi-threaded BLAS
loses to its own synchronization overhead (dramatically so on throttled
machines), so compute-heavy entry points run under a single-thread limit.
"""

from __future__ import annotations

from contextlib import contextmanager

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover - threadpoolctl ships with the deps
    threadpool_limits = None


@contextmanager
def single_thread_blas():
    if threadpool_limits is None:
        yield
        return
    with threadpool_limits(limits=1):
        yield
