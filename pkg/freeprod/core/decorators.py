"""Custom decorators for freeprod."""

import functools
import logging
import threading
import time

from flask import jsonify

from freeprod.core.exceptions import FreeProdException

logger = logging.getLogger(__name__)


def cached(timeout=300):
    """Simple in-memory cache decorator for pure functions of hashable arguments."""
    _cache = {}
    _times = {}
    _lock = threading.RLock()

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            key = (args, tuple(sorted(kwargs.items())))
            now = time.time()
            with _lock:
                if key in _cache and (now - _times[key]) < timeout:
                    return _cache[key]
            result = func(*args, **kwargs)
            with _lock:
                _cache[key] = result
                _times[key] = now
            return result

        def clear_cache():
            with _lock:
                _cache.clear()
                _times.clear()

        wrapper.clear_cache = clear_cache
        return wrapper
    return decorator


def timed(func):
    """Log execution time at INFO."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        logger.info("%s took %.3fs", func.__name__, time.perf_counter() - start)
        return result
    return wrapper


def api_response(func):
    """Wrap return value in a JSON response, mapping domain errors to their status."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        from freeprod.dto import ApiResponseDTO

        try:
            result = func(*args, **kwargs)
            return jsonify(ApiResponseDTO(True, data=result).to_dict())
        except FreeProdException as e:
            logger.info("%s rejected: %s", func.__name__, e.message)
            return jsonify(ApiResponseDTO(False, error=e.message).to_dict()), e.status_code
        except Exception as e:
            logger.exception("Unhandled error in %s", func.__name__)
            return jsonify(ApiResponseDTO(False, error=str(e)).to_dict()), 500
    return wrapper
