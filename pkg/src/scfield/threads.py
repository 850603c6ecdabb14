"""Worker-count policy shared by the parallel stages."""
from __future__ import annotations

import os


def worker_count() -> int:
    """Threads to use: ``SCF_THREADS`` if set and positive, else the CPU count."""
    raw = os.environ.get("SCF_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SCF_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ValueError("SCF_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)
