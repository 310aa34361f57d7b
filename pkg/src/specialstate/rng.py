"""Deterministic random substreams.

All Monte Carlo in the package draws from ``numpy.random.PCG64`` generators
seeded through :class:`numpy.random.SeedSequence`.  A substream is addressed
by ``(master seed, module tag, chunk index)``; the tag is hashed with CRC-32
so the mapping is stable across Python processes.  Work split into chunks
therefore produces the same numbers no matter how chunks are scheduled.
"""
from __future__ import annotations

import zlib

import numpy as np

from .errors import ValidationError


def tag_key(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def substream(seed: int, tag: str, chunk: int = 0) -> np.random.Generator:
    """Generator for chunk ``chunk`` of the stream named ``tag``."""
    if seed < 0:
        raise ValidationError("seed must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(tag_key(tag), int(chunk)))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, tag: str) -> int:
    """A 63-bit integer seed derived from ``(seed, tag)``, e.g. for repeated trials."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(tag_key(tag),))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
