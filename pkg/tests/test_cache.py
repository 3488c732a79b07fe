import time

from freeprod.config import TestingConfig
from freeprod.core.cache import InMemoryCache, resolution_cache
from freeprod.services import exact
from freeprod.services.resolution import enumerate_quotients, word_source


class TestInMemoryCache:
    def test_oldest_entries_evicted(self):
        cache = InMemoryCache(max_entries=3)
        for k in range(5):
            cache.set(k, k * k)
        assert len(cache) == 3
        assert 0 not in cache and 1 not in cache
        assert cache.get(4) == 16

    def test_rewrite_refreshes_position(self):
        cache = InMemoryCache(max_entries=2)
        cache.set('a', 1)
        cache.set('b', 2)
        cache.set('a', 3)
        cache.set('c', 4)
        assert 'b' not in cache
        assert cache.get('a') == 3

    def test_expired_entries_go_first(self):
        cache = InMemoryCache(max_entries=2)
        cache.set('stale', 1, ttl=0)
        cache.set('fresh', 2)
        time.sleep(0.01)
        cache.set('new', 3)
        assert 'fresh' in cache and 'new' in cache
        assert 'stale' not in cache

    def test_unbounded_by_default(self):
        cache = InMemoryCache()
        for k in range(1000):
            cache.set(k, k)
        assert len(cache) == 1000


def test_resolution_cache_is_bounded(c2c2, c2c3, monkeypatch):
    assert resolution_cache.max_entries == TestingConfig.CACHE_MAX_ENTRIES
    monkeypatch.setattr(resolution_cache, 'max_entries', 2)
    resolution_cache.clear()
    words = [c2c2.word(w) for w in ('ab', 'abab', '(ab)^3')] + [c2c3.word('ab')]
    for w in words:
        enumerate_quotients(word_source([w]))
    assert len(resolution_cache) == 2
    resolution_cache.clear()


def test_arc_extension_memo_is_bounded():
    info = exact._arc_extensions.cache_info()
    assert info.maxsize is not None
    assert info.currsize <= info.maxsize
