"""In-memory memo store with TTL support, shared by the resolution search."""

import threading
import time

from freeprod.config import get_config


class InMemoryCache:
    def __init__(self, default_ttl=3600, max_entries=None):
        self._cache = {}
        self._lock = threading.RLock()
        self.default_ttl = default_ttl
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0

    def get(self, key, default=None):
        with self._lock:
            entry = self._cache.get(key)
            if entry and (time.time() - entry['time']) < entry['ttl']:
                self.hits += 1
                return entry['value']
            if entry:
                del self._cache[key]
            self.misses += 1
            return default

    def set(self, key, value, ttl=None):
        with self._lock:
            # reinsert so dict order stays oldest-write first
            self._cache.pop(key, None)
            self._cache[key] = {'value': value, 'time': time.time(),
                                'ttl': self.default_ttl if ttl is None else ttl}
            if self.max_entries is not None and len(self._cache) > self.max_entries:
                self._evict()

    def _evict(self):
        now = time.time()
        for key in [k for k, e in self._cache.items() if now - e['time'] >= e['ttl']]:
            del self._cache[key]
        while len(self._cache) > self.max_entries:
            del self._cache[next(iter(self._cache))]

    def get_or_compute(self, key, compute, ttl=None):
        """Return the cached value for ``key``, filling it with ``compute()`` on a miss.

        The lock is not held while computing; two racing callers may both compute,
        the later result wins and both results are equal.
        """
        marker = object()
        value = self.get(key, marker)
        if value is marker:
            value = compute()
            self.set(key, value, ttl)
        return value

    def delete(self, key):
        with self._lock:
            self._cache.pop(key, None)

    def clear(self):
        with self._lock:
            self._cache.clear()
            self.hits = self.misses = 0

    def __contains__(self, key):
        with self._lock:
            return key in self._cache

    def __len__(self):
        with self._lock:
            return len(self._cache)


resolution_cache = InMemoryCache(max_entries=get_config().CACHE_MAX_ENTRIES)
