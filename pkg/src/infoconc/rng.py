"""Counter-based random streams.

Every uniform is a pure function of ``(seed, stream, counter)``: the stream key
is derived from ``(seed, stream)`` with the SplitMix64 finalizer and the
counter walks the Weyl sequence ``key + k * golden``.  Sampling is split into
fixed-size chunks, chunk ``j`` owning stream ``j``, so the sample set does not
depend on how many workers process the chunks.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._backend import kernels

MASK64 = (1 << 64) - 1
CHUNK_ROWS = 1 << 15
DEFAULT_SEED = 0xC0FFEE


def _mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int) -> int:
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be non-negative")
    return _mix64(_mix64(seed) ^ _mix64((stream * 0xD1B54A32D192ED03 + 0x8BB84B93962EACC9) & MASK64))


def uniform_block(seed: int, stream: int, rows: int, width: int, backend=None) -> np.ndarray:
    """``rows x width`` uniforms in (0, 1); row r uses counters r*width .. r*width+width-1."""
    k = kernels if backend is None else backend
    flat = k.uniforms(stream_key(seed, stream), 0, rows * width)
    return flat.reshape(rows, width)


def worker_count() -> int:
    raw = os.environ.get("INFOCONC_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def chunk_layout(m: int, chunk_rows: int = CHUNK_ROWS) -> list[tuple[int, int, int]]:
    """(stream, first row, rows) for each chunk of an m-row draw."""
    out = []
    for j, start in enumerate(range(0, m, chunk_rows)):
        out.append((j, start, min(chunk_rows, m - start)))
    return out


def map_chunks(fn, m: int, chunk_rows: int = CHUNK_ROWS, workers: int | None = None) -> list:
    """Apply ``fn(stream, start, rows)`` to every chunk; results in chunk order."""
    layout = chunk_layout(m, chunk_rows)
    workers = worker_count() if workers is None else workers
    if workers == 1 or len(layout) == 1:
        return [fn(*c) for c in layout]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: fn(*c), layout))
