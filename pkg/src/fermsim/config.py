"""Runtime configuration: kernel thread count and backend selection.

Thread count resolution order: value set programmatically (or by the CLI
--threads flag) wins over the FERMSIM_NUM_THREADS environment variable,
which wins over the single-threaded default.  The compiled kernel backend
can be disabled by setting FERMSIM_BACKEND=python before import.
"""

from __future__ import annotations

import os

ENV_NUM_THREADS = "FERMSIM_NUM_THREADS"
ENV_BACKEND = "FERMSIM_BACKEND"

_num_threads: int | None = None


def set_num_threads(n: int | None) -> None:
    """Set the kernel thread count; None restores environment/default lookup."""
    global _num_threads
    if n is not None:
        n = int(n)
        if n < 1:
            raise ValueError(f"thread count must be >= 1, got {n}")
    _num_threads = n


def get_num_threads() -> int:
    if _num_threads is not None:
        return _num_threads
    env = os.environ.get(ENV_NUM_THREADS)
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ValueError(f"{ENV_NUM_THREADS} must be an integer, got {env!r}") from exc
        if n < 1:
            raise ValueError(f"{ENV_NUM_THREADS} must be >= 1, got {n}")
        return n
    return 1


def requested_backend() -> str:
    """Backend requested via environment: "compiled", "python", or "auto"."""
    value = os.environ.get(ENV_BACKEND, "auto").strip().lower()
    if value in ("", "auto"):
        return "auto"
    if value in ("python", "fallback", "pure-python"):
        return "python"
    if value in ("compiled", "cython", "native"):
        return "compiled"
    raise ValueError(f"unrecognized {ENV_BACKEND} value: {value!r}")
