# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals
from collections import OrderedDict

class KernelCache(object):
    """Base class for kernel row caches used by the SMO trainer.

    Every optimization step needs two full rows of the kernel matrix. The
    trainer asks its cache for a row before computing it, and hands freshly
    computed rows back to the cache. Rows are keyed by training index and are
    1-D numpy arrays that must not be modified by the caller.

    If you'd like a different eviction policy (or a cache shared between
    several trainings on the same data) extend this class and implement its
    functions.
    """

    def get(self, index):
        """Retrieve a cached kernel row.

        Args:
            index (int): The training index of the row.

        Returns:
            numpy.ndarray: The row, or ``None`` if it isn't cached.
        """
        raise NotImplementedError

    def set(self, index, row):
        """Store a kernel row.

        Args:
            index (int): The training index of the row.
            row (numpy.ndarray): The kernel values against every training
                sample.
        """
        raise NotImplementedError

    def reset(self):
        """Drop every cached row, for example before training on new data."""
        raise NotImplementedError

    def stats(self):
        """Return a dict with ``hits``, ``misses`` and ``size``."""
        raise NotImplementedError


class MemoryKernelCache(KernelCache):
    """The default in-memory LRU kernel row cache.

    Parameters:
        capacity (int): The maximum number of rows kept. When full, the least
            recently used row is evicted.
    """

    def __init__(self, capacity=1024):
        self.capacity = max(int(capacity), 2)
        self._rows = OrderedDict()
        self._hits = 0
        self._misses = 0

    def get(self, index):
        row = self._rows.get(index)
        if row is None:
            self._misses += 1
            return None
        self._rows.move_to_end(index)
        self._hits += 1
        return row

    def set(self, index, row):
        self._rows[index] = row
        self._rows.move_to_end(index)
        while len(self._rows) > self.capacity:
            self._rows.popitem(last=False)

    def reset(self):
        self._rows = OrderedDict()
        self._hits = 0
        self._misses = 0

    def stats(self):
        return dict(hits=self._hits, misses=self._misses, size=len(self._rows))


class NullKernelCache(KernelCache):
    """The null cache doesn't store any rows.

    Every row is recomputed when needed. This is used by the unit tests and
    for very small problems where caching buys nothing.
    """
    def get(self, *args, **kwargs):
        return None

    def set(self, *args, **kwargs):
        pass

    def reset(self, *args, **kwargs):   # pragma: no cover
        pass

    def stats(self, *args, **kwargs):
        return dict(hits=0, misses=0, size=0)
