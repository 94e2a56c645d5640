"""Seeded random streams.

A :class:`RandomStream` wraps a numpy ``Generator`` built from a
``SeedSequence`` so that every sampler in the package is a pure function of
``(parameters, stream)``.  Child streams are derived by index through the
seed sequence spawn key, which makes ``stream.child(i)`` deterministic in
``(seed, i)`` and statistically independent of its siblings.
"""

from __future__ import annotations

import zlib

import numpy as np

_SEED_MASK = (1 << 64) - 1


def name_key(name: str) -> int:
    """Stable integer key for a string, used to derive named child streams."""
    return zlib.crc32(name.encode("utf-8"))


class RandomStream:
    """A reproducible source of random variates.

    Parameters
    ----------
    seed : int
        64-bit unsigned seed.  Values outside ``[0, 2**64)`` are rejected.
    spawn_key : tuple of int, optional
        Path from the root stream; set by :meth:`child`.

    Streams are not thread safe.  Concurrent work should take one child
    stream per worker.
    """

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        seed = int(seed)
        if seed < 0 or seed > _SEED_MASK:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.spawn_key = tuple(int(i) for i in spawn_key)
        seq = np.random.SeedSequence(seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.PCG64(seq))
        self.position = 0

    def __repr__(self):
        return (f"RandomStream(seed={self.seed}, spawn_key={self.spawn_key}, "
                f"position={self.position})")

    def child(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, self.spawn_key + (int(index),))

    def named(self, name: str) -> "RandomStream":
        """Child stream keyed by a name rather than a position."""
        return self.child(name_key(name))

    def split(self, n: int) -> list["RandomStream"]:
        return [self.child(i) for i in range(n)]

    def _count(self, size):
        self.position += 1 if size is None else int(np.prod(size))

    # Primitive draws. Every sampler in the package goes through these.

    def uniform_open(self, size=None):
        """Uniform on the open interval (0, 1)."""
        self._count(size)
        # random() is k/2**53 for integer k; the half-step offset excludes both ends
        return self._gen.random(size) + 2.0 ** -54

    def standard_gamma(self, shape: float, size=None):
        self._count(size)
        return self._gen.standard_gamma(shape, size)

    def standard_normal(self, size=None):
        self._count(size)
        return self._gen.standard_normal(size)

    def signs(self, size=None):
        """Independent fair signs in {-1.0, +1.0}."""
        self._count(size)
        bits = self._gen.integers(0, 2, size=size)
        return 2.0 * bits - 1.0

    def permutation(self, n: int):
        self._count(n)
        return self._gen.permutation(n)


def as_stream(stream_or_seed) -> RandomStream:
    """Accept either a :class:`RandomStream` or an integer seed."""
    if isinstance(stream_or_seed, RandomStream):
        return stream_or_seed
    return RandomStream(int(stream_or_seed))
