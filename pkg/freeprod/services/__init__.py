"""Computational services: resolution search, exact counting, limit laws, sampling, oracles."""
