"""
Exhaustive ground truth for tiny N: every homomorphism Gamma -> Sym(N) exactly once.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from sympy.utilities.iterables import multiset_partitions

from freeprod.config import get_config
from freeprod.core.exceptions import BudgetExceededException, InvalidInputException
from freeprod.models.group import Presentation, Word
from freeprod.models.hom import Hom, batch_cycle_counts, batch_fix_counts, evaluate_batch
from freeprod.models.subcover import SubCover
from freeprod.utils import divisors

logger = logging.getLogger(__name__)

BATCH = 50_000

Perm = Tuple[int, ...]


@dataclass(frozen=True)
class JointStats:
    other: str
    mean: Fraction
    other_mean: Fraction
    joint_mean: Fraction

    @property
    def covariance(self) -> Fraction:
        return self.joint_mean - self.mean * self.other_mean


@dataclass(frozen=True)
class ExhaustiveStats:
    word: str
    N: int
    total_homs: int
    fix_distribution: Dict[int, int]
    moments: Dict[int, Fraction]
    cycle_distributions: Dict[int, Dict[int, int]] = field(default_factory=dict)
    cycle_means: Dict[int, Fraction] = field(default_factory=dict)
    identity_probability: Fraction = Fraction(0)
    joint: Optional[JointStats] = None

    @property
    def mean(self) -> Fraction:
        return self.moments.get(1, Fraction(0))


# ── enumeration ─────────────────────────────────────────────

def order_divider_perms(q: int, n: int) -> List[Perm]:
    """All sigma in Sym(n) with sigma^q = id, built cycle by cycle."""
    lengths = divisors(q)
    found: List[Perm] = []

    def extend(sigma: List[Optional[int]], free: List[int]):
        if not free:
            found.append(tuple(sigma))
            return
        head, rest = free[0], free[1:]
        for d in lengths:
            if d - 1 > len(rest):
                break
            for others in itertools.permutations(rest, d - 1):
                cycle = (head,) + others
                for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                    sigma[a] = b
                extend(sigma, [x for x in rest if x not in others])
                for a in cycle:
                    sigma[a] = None

    extend([None] * n, list(range(n)))
    return found


def _factor_choices(p: Presentation, n: int) -> List[List[Tuple[Perm, ...]]]:
    choices = []
    for f in p.factors:
        if f.is_cyclic:
            choices.append([(s,) for s in order_divider_perms(f.size, n)])
        else:
            sym = list(itertools.permutations(range(n)))
            choices.append(list(itertools.product(sym, repeat=f.rank)))
    return choices


def hom_total(p: Presentation, n: int) -> int:
    from freeprod.services.exact import hom_count

    total = 1
    for f in p.factors:
        total *= hom_count(f.size, n) if f.is_cyclic else math.factorial(n) ** f.rank
    return total


def _check_cap(p: Presentation, n: int, cap: Optional[int]) -> int:
    cap = cap if cap is not None else get_config().HOM_CAP
    total = hom_total(p, n)
    if total > cap:
        logger.warning("Refusing to enumerate %d homomorphisms of %s at N=%d", total, p, n)
        raise BudgetExceededException('homomorphism', cap)
    return total


def enumerate_homs(p: Presentation, n: int, cap: Optional[int] = None) -> Iterator[Hom]:
    if n < 0:
        raise InvalidInputException(f"N must be non-negative, got {n}")
    _check_cap(p, n, cap)
    for combo in itertools.product(*_factor_choices(p, n)):
        yield Hom(p, n, tuple(tuple(np.array(s, dtype=np.int64) for s in imgs) for imgs in combo))


def _image_batches(p: Presentation, n: int, cap: Optional[int]):
    """Yield per-factor (B, n) image arrays covering Hom(Gamma, Sym(n)) in product order."""
    total = _check_cap(p, n, cap)
    tables = [[np.array([c[g] for c in choices], dtype=np.int64).reshape(len(choices), n)
               for g in range(len(choices[0]))]
              for choices in _factor_choices(p, n)]
    counts = tuple(len(t[0]) for t in tables)
    for start in range(0, total, BATCH):
        flat = np.arange(start, min(start + BATCH, total))
        idx = np.unravel_index(flat, counts)
        yield [tuple(arr[idx[i]] for arr in tables[i]) for i in range(len(tables))]


def exact_stats(gamma: Word, n: int, other: Optional[Word] = None, max_cycle_len: Optional[int] = None,
                moments: int = 3, cap: Optional[int] = None) -> ExhaustiveStats:
    """Exact distribution of fix and of cycle counts of gamma over all of Hom(Gamma, Sym(N))."""
    p = gamma.presentation
    if other is not None and other.presentation != p:
        raise InvalidInputException("Both words must use the same presentation")
    if n < 1:
        raise InvalidInputException(f"N must be positive, got {n}")
    max_len = min(max_cycle_len or n, n)
    fix_hist = np.zeros(n + 1, dtype=np.int64)
    cyc_hist = np.zeros((max_len, n + 1), dtype=np.int64)
    other_sum = 0
    joint_sum = 0
    total = 0
    for images in _image_batches(p, n, cap):
        perms = evaluate_batch(images, gamma)
        fix = batch_fix_counts(perms)
        fix_hist += np.bincount(fix, minlength=n + 1)
        cyc = batch_cycle_counts(perms, max_len)
        for k in range(max_len):
            cyc_hist[k] += np.bincount(cyc[:, k], minlength=n + 1)
        if other is not None:
            fix2 = batch_fix_counts(evaluate_batch(images, other))
            other_sum += int(fix2.sum())
            joint_sum += int((fix.astype(np.int64) * fix2).sum())
        total += len(fix)

    distribution = {v: int(c) for v, c in enumerate(fix_hist.tolist()) if c}
    raw = {r: Fraction(sum(v ** r * c for v, c in distribution.items()), total)
           for r in range(1, moments + 1)}
    cycle_distributions = {k + 1: {v: int(c) for v, c in enumerate(cyc_hist[k].tolist()) if c}
                           for k in range(max_len)}
    cycle_means = {k: Fraction(sum(v * c for v, c in dist.items()), total)
                   for k, dist in cycle_distributions.items()}
    joint = None
    if other is not None:
        joint = JointStats(other.to_text(), raw.get(1, Fraction(0)), Fraction(other_sum, total),
                           Fraction(joint_sum, total))
    return ExhaustiveStats(gamma.to_text(), n, total, distribution, raw, cycle_distributions,
                           cycle_means, Fraction(distribution.get(n, 0), total), joint)


# ── quotient oracle ─────────────────────────────────────────

def partition_quotient_count(source: SubCover) -> int:
    """Number of same-fiber vertex partitions of ``source`` with a valid quotient."""
    from freeprod.services.resolution import quotient_subcover

    fibers = sorted(set(source.fibers))
    groups = [[v for v in range(source.num_vertices) if source.fibers[v] == f] for f in fibers]
    count = 0
    for blocks in itertools.product(*(list(multiset_partitions(g)) for g in groups)):
        partition = [0] * source.num_vertices
        label = 0
        for fiber_blocks in blocks:
            for block in fiber_blocks:
                for v in block:
                    partition[v] = label
                label += 1
        if quotient_subcover(source, tuple(partition)).is_valid:
            count += 1
    return count
