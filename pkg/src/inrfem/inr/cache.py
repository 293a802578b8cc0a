"""Exact-match gradient cache keyed by quantized coordinates.

Gauss points are produced by identical arithmetic across faces, so keying
on a 1e-12 quantization grid is a safe exact-match cache.  Concurrent
insert-or-get is supported; duplicate computation under a race is fine
because identical inputs store identical values (last write wins).
"""

import numpy as np

_QUANT = 1e-12


def _key(x):
    return tuple(int(round(c / _QUANT)) for c in np.asarray(x, dtype=float))


class GradientCache:
    def __init__(self):
        self._store = {}
        self.hits = 0
        self.misses = 0

    def get(self, x):
        entry = self._store.get(_key(x))
        if entry is None:
            self.misses += 1
            return None
        self.hits += 1
        return entry

    def put(self, x, gradient, value):
        self._store[_key(x)] = (np.array(gradient, copy=True), float(value))

    def __len__(self):
        return len(self._store)

    def clear(self):
        self._store.clear()
        self.hits = self.misses = 0
