"""
Configuration classes for freeprod.
Supports multiple environments: development, testing, production.
"""

import os
from dotenv import load_dotenv

basedir = os.path.abspath(os.path.dirname(__file__))
load_dotenv(os.path.join(basedir, '../.env'))


def _int_env(name, default):
    value = os.environ.get(name)
    try:
        return int(value) if value else default
    except ValueError:
        return default


class Config:
    """Base configuration with common settings."""

    # Flask
    SECRET_KEY = os.environ.get('SECRET_KEY') or 'dev-secret-key-change-in-production'
    JSON_SORT_KEYS = False

    # Resolution search: merge-tree node budget
    MERGE_BUDGET = _int_env('FREEPROD_BUDGET', 10_000_000)

    # Brute-force oracle: cap on enumerated homomorphisms
    HOM_CAP = _int_env('FREEPROD_HOM_CAP', 10 ** 8)

    # Reports
    DECIMAL_PRECISION = _int_env('FREEPROD_PRECISION', 12)
    MAX_CYCLE_LEN = _int_env('FREEPROD_MAX_CYCLE_LEN', 3)

    # Monte Carlo
    THREADS = _int_env('FREEPROD_THREADS', 1)
    MC_CHUNK_SIZE = _int_env('FREEPROD_CHUNK', 10_000)
    MIXTURE_TAIL = 1e-9

    # Cache
    CACHE_TTL = _int_env('FREEPROD_CACHE_TTL', 3600)
    CACHE_MAX_ENTRIES = _int_env('FREEPROD_CACHE_SIZE', 256)


class DevelopmentConfig(Config):
    """Development environment configuration."""

    DEBUG = True
    TESTING = False


class TestingConfig(Config):
    """Testing environment configuration."""

    TESTING = True
    DEBUG = True
    MERGE_BUDGET = 2_000_000
    HOM_CAP = 2_000_000
    MC_CHUNK_SIZE = 1_000


class ProductionConfig(Config):
    """Production environment configuration."""

    DEBUG = False
    TESTING = False


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': DevelopmentConfig
}


def get_config(env=None):
    """
    Get configuration class for specified environment.

    Args:
        env: Environment name (development, testing, production)

    Returns:
        Configuration class
    """
    env = env or os.environ.get('FREEPROD_ENV', 'development')
    return config.get(env, config['default'])
