"""Shared worker-count policy: LAB_THREADS caps parallelism when set."""

from __future__ import annotations

import os


def thread_count() -> int:
    raw = os.environ.get("LAB_THREADS", "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ValueError(f"LAB_THREADS must be an integer, got {raw!r}") from exc
        if cap < 1:
            raise ValueError(f"LAB_THREADS must be positive, got {cap}")
        return cap
    return os.cpu_count() or 1
