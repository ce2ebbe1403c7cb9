"""Deterministic, named random streams.

All randomness in the package flows from a single integer seed through
named sub-streams, so multi-stage experiments (graph draw, weight draws,
train/test split) are reproducible independently of call order.  Streams
use the counter-based Philox generator, which makes vectorised per-edge
and per-draw sampling order-independent.
"""

from __future__ import annotations

import zlib

import numpy as np


def _stream_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def substream(seed: int, name: str) -> np.random.Generator:
    """Return the generator for the sub-stream `name` of `seed`."""
    ss = np.random.SeedSequence([int(seed), _stream_key(name)])
    return np.random.Generator(np.random.Philox(ss))


def spawn_streams(seed: int, name: str, count: int) -> list[np.random.Generator]:
    """Independent child generators, e.g. one per Monte-Carlo draw."""
    ss = np.random.SeedSequence([int(seed), _stream_key(name)])
    return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(count)]
