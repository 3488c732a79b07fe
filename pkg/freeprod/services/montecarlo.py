"""
Monte Carlo estimates from uniformly random homomorphisms Gamma -> Sym(N).

A uniform sigma with sigma^q = id is drawn by shuffling the points and cutting
the shuffled order into consecutive cycles, each cycle length d | q drawn with
probability (N'-1)_{d-1} h_q(N'-d) / h_q(N') given the N' points still free.
Trials run in fixed-size chunks, chunk k on stream k of
``SeedSequence(seed).spawn(...)``, merged in chunk order, so results depend on
the seed and chunk size only.
"""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy.stats import chisquare

from freeprod.config import get_config
from freeprod.core.decorators import cached
from freeprod.core.exceptions import InvalidInputException
from freeprod.models.group import Presentation, Word
from freeprod.models.hom import Hom, batch_cycle_counts, batch_fix_counts, evaluate_batch
from freeprod.services.exact import hom_table
from freeprod.utils import divisors, falling

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmpiricalStats:
    trials: int
    mean: float
    variance: float
    stderr: float
    pmf: Dict[int, int]
    seed: Optional[int] = None

    @classmethod
    def from_samples(cls, values: np.ndarray, seed: Optional[int] = None) -> 'EmpiricalStats':
        trials = int(values.size)
        if trials == 0:
            return cls(0, float('nan'), float('nan'), float('nan'), {}, seed)
        data = values.astype(np.float64)
        mean = float(data.mean())
        variance = float(data.var(ddof=1)) if trials > 1 else 0.0
        counts = Counter(int(v) for v in values.tolist())
        return cls(trials, mean, variance, math.sqrt(variance / trials),
                   dict(sorted(counts.items())), seed)

    def frequencies(self) -> Dict[int, float]:
        return {k: c / self.trials for k, c in self.pmf.items()} if self.trials else {}


@dataclass(frozen=True)
class Estimate:
    word: str
    N: int
    fix: EmpiricalStats
    cycles: Dict[int, EmpiricalStats] = field(default_factory=dict)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    pvalue: float
    support: int
    draws: int


# ── samplers ────────────────────────────────────────────────

@cached(timeout=3600)
def _cycle_length_table(q: int, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(lengths, cdf[N', k], top[N']): cdf of the cycle length with N' points left."""
    h = hom_table(q)
    lengths = np.array(divisors(q), dtype=np.int64)
    cdf = np.zeros((n + 1, len(lengths)))
    top = np.zeros(n + 1, dtype=np.int64)
    for rest in range(1, n + 1):
        acc = Fraction(0)
        for k, d in enumerate(lengths.tolist()):
            if d <= rest:
                acc += Fraction(falling(rest - 1, d - 1) * h[rest - d], h[rest])
                top[rest] = k
            cdf[rest, k] = float(acc)
    return lengths, cdf, top


def sample_order_dividers(q: int, n: int, batch: int, rng: np.random.Generator) -> np.ndarray:
    """(batch, n) array of independent uniform permutations with sigma^q = id."""
    if q < 1 or n < 0 or batch < 0:
        raise InvalidInputException("Sampler needs q >= 1, N >= 0 and a non-negative batch")
    order = rng.permuted(np.tile(np.arange(n), (batch, 1)), axis=1)
    if n == 0 or batch == 0:
        return order
    lengths, cdf, top = _cycle_length_table(q, n)
    starts = np.zeros((batch, n), dtype=bool)
    rows = np.arange(batch)
    pos = np.zeros(batch, dtype=np.int64)
    remaining = np.full(batch, n, dtype=np.int64)
    while True:
        active = remaining > 0
        if not active.any():
            break
        u = rng.random(batch)
        pick = np.count_nonzero(u[:, None] > cdf[remaining], axis=1)
        pick = np.minimum(pick, top[remaining])
        step = np.where(active, lengths[pick], 0)
        starts[rows[active], pos[active]] = True
        pos += step
        remaining -= step
    cols = np.arange(n)
    block_start = np.maximum.accumulate(np.where(starts, cols, 0), axis=1)
    following = np.concatenate([starts[:, 1:], np.ones((batch, 1), dtype=bool)], axis=1)
    successor = np.where(following, block_start, cols + 1)
    sigma = np.empty_like(order)
    np.put_along_axis(sigma, order, np.take_along_axis(order, successor, axis=1), axis=1)
    return sigma


def sample_order_divider(q: int, n: int, rng: np.random.Generator) -> np.ndarray:
    return sample_order_dividers(q, n, 1, rng)[0]


def sample_images(p: Presentation, n: int, batch: int, rng: np.random.Generator):
    """Per-factor tuples of (batch, n) image arrays of independent uniform homomorphisms."""
    images = []
    for f in p.factors:
        if f.is_cyclic:
            images.append((sample_order_dividers(f.size, n, batch, rng),))
        else:
            images.append(tuple(rng.permuted(np.tile(np.arange(n), (batch, 1)), axis=1)
                                for _ in range(f.rank)))
    return images


def sample_hom(p: Presentation, n: int, rng: np.random.Generator) -> Hom:
    images = sample_images(p, n, 1, rng)
    return Hom(p, n, tuple(tuple(s[0] for s in imgs) for imgs in images))


# ── estimates ───────────────────────────────────────────────

def _run_chunk(gamma: Word, n: int, size: int, stream: np.random.SeedSequence,
               max_len: int) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(stream)
    images = sample_images(gamma.presentation, n, size, rng)
    perms = evaluate_batch(images, gamma)
    return batch_fix_counts(perms), batch_cycle_counts(perms, max_len)


def estimate(gamma: Word, n: int, trials: int, seed: int, max_cycle_len: Optional[int] = None,
             threads: Optional[int] = None, chunk_size: Optional[int] = None) -> Estimate:
    if n < 1:
        raise InvalidInputException(f"N must be positive, got {n}")
    if trials < 0:
        raise InvalidInputException(f"Trial count must be non-negative, got {trials}")
    cfg = get_config()
    max_len = max_cycle_len if max_cycle_len is not None else cfg.MAX_CYCLE_LEN
    threads = threads or cfg.THREADS
    chunk_size = chunk_size or cfg.MC_CHUNK_SIZE
    sizes = [min(chunk_size, trials - start) for start in range(0, trials, chunk_size)]
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    logger.debug("Sampling %d trials in %d chunks on %d threads", trials, len(sizes), threads)

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        parts = list(pool.map(lambda job: _run_chunk(gamma, n, job[0], job[1], max_len),
                              zip(sizes, streams)))

    fix = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, dtype=np.int64)
    cyc = np.concatenate([p[1] for p in parts]) if parts else np.zeros((0, max_len), dtype=np.int64)
    cycles = {k: EmpiricalStats.from_samples(cyc[:, k - 1], seed) for k in range(1, max_len + 1)}
    return Estimate(gamma.to_text(), n, EmpiricalStats.from_samples(fix, seed), cycles)


def chi_square_uniformity(q: int, n: int, draws: int, seed: int) -> ChiSquareResult:
    """Goodness of fit of the sampler against the uniform law on {sigma : sigma^q = id}."""
    from freeprod.services.bruteforce import order_divider_perms

    support = order_divider_perms(q, n)
    index = {perm: k for k, perm in enumerate(support)}
    rng = np.random.default_rng(seed)
    observed = np.zeros(len(support), dtype=np.int64)
    for start in range(0, draws, 100_000):
        batch = sample_order_dividers(q, n, min(100_000, draws - start), rng)
        keys, counts = np.unique(batch, axis=0, return_counts=True)
        for key, count in zip(keys, counts):
            observed[index[tuple(int(x) for x in key)]] += count
    if len(support) < 2:
        return ChiSquareResult(0.0, 1.0, len(support), draws)
    result = chisquare(observed)
    return ChiSquareResult(float(result.statistic), float(result.pvalue), len(support), draws)


def total_variation(stats: EmpiricalStats, pmf: Mapping) -> float:
    freq = stats.frequencies()
    keys = set(freq) | set(pmf)
    return 0.5 * sum(abs(freq.get(k, 0.0) - float(pmf.get(k, 0.0))) for k in keys)


__all__ = [
    'EmpiricalStats', 'Estimate', 'ChiSquareResult', 'sample_order_divider', 'sample_order_dividers',
    'sample_hom', 'sample_images', 'estimate', 'chi_square_uniformity', 'total_variation',
]
