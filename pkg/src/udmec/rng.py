"""Named random streams derived from a single master seed.

Every consumer asks for a stream by name, so adding a new consumer (or
running consumers in a different order) never shifts the draws of the
others.
"""

import zlib

import numpy as np


def _name_key(name):
    return zlib.crc32(name.encode("utf-8"))


def stream(seed, name, *extra):
    """Return an independent ``numpy.random.Generator`` for ``(seed, name, *extra)``.

    ``extra`` may hold additional non-negative integers (e.g. a run index) that
    further separate streams sharing a name.
    """
    key = (_name_key(name),) + tuple(int(e) for e in extra)
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


class Streams:
    """Lazily created named streams sharing one master seed."""

    def __init__(self, seed):
        self.seed = int(seed)
        self._cache = {}

    def __getitem__(self, name):
        if name not in self._cache:
            self._cache[name] = stream(self.seed, name)
        return self._cache[name]
