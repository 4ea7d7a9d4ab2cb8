"""Seed derivation and counter-based hashing.

All randomness in the package descends from one integer master seed. A stream
is addressed by a path ``(master_seed, tag, index, ...)`` and turned into a
:class:`numpy.random.Generator` through :class:`numpy.random.SeedSequence`, so
the stream for replication ``i`` never depends on how many other replications
ran before it, or on which thread ran them.

Scenery values need random access at arbitrary sites of the integer line. They
use a counter-based SplitMix64 construction: the value at counter ``c`` under
key ``k`` is ``mix64(k + c * GAMMA)``, which is exactly the ``c``-th output of a
SplitMix64 stream started from state ``k``. A second keyed round is applied on
top, because two plain SplitMix64 streams are always shifts of one another.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

# stream tags of the derivation tree
TAG_WALK = 1
TAG_SCENERY = 2
TAG_Q_RANGE = 3
TAG_Q_SURVIVAL = 4
TAG_SELF_SIMILARITY = 5
TAG_DPRIME = 6
TAG_LEMMA = 7
TAG_QUENCHED_Q = 8

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seeds must be non-negative integers, got {seed}")
    return seed


def seed_sequence(seed: int, *path: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(p) for p in path))


def generator(seed: int, *path: int) -> np.random.Generator:
    """Independent PCG64 generator for the stream ``(seed, *path)``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *path)))


def derive_key(seed: int, *path: int) -> int:
    """64-bit integer key for the stream ``(seed, *path)``."""
    return int(seed_sequence(seed, *path).generate_state(1, dtype=np.uint64)[0])


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, applied elementwise to a uint64 array."""
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def stream_base(key: int, tag: int) -> tuple[np.uint64, np.uint64]:
    mask = 0xFFFFFFFFFFFFFFFF
    k = np.array([key & mask, (key ^ (tag * 0xD1B54A32D192ED03)) & mask, tag], dtype=np.uint64)
    k = mix64(mix64(k) + GAMMA)
    return k[1], k[0] ^ k[2]


def counter_bits(key: int, tag: int, counters) -> np.ndarray:
    """Random 64-bit words at integer ``counters`` (any int64 values, negative allowed)."""
    c = np.asarray(counters, dtype=np.int64).view(np.uint64)
    b1, b2 = stream_base(key, tag)
    return mix64(mix64(b1 + c * GAMMA) ^ b2)


def counter_uniform(key: int, tag: int, counters) -> np.ndarray:
    """Uniform draws on the open interval (0, 1) with 53-bit resolution."""
    bits = counter_bits(key, tag, counters)
    return ((bits >> _S11).astype(np.float64) + 0.5) * 2.0**-53


def parallel_map(fn: Callable[[T], object], items: Iterable[T], threads: int = 1) -> list:
    """Ordered map, optionally over a thread pool. Output order never depends on scheduling."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def chunk_ranges(total: int, size: int) -> Sequence[tuple[int, int]]:
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]
