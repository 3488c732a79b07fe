"""
Exact finite-N expectations for gamma-random permutations.

Everything here is exact rational arithmetic on big integers. Expectations of
fixed points and their moments are sums of embedding expectations over the
resolution of the lift cover; embedding expectations factor over the o-fiber
and the factors, a cyclic factor contributing an extension count divided by
|Hom(C_q, S_N)|.
"""

import itertools
import logging
import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from freeprod.core.exceptions import InvalidInputException
from freeprod.models.group import Word, classify
from freeprod.models.subcover import E_GEN, O_FIBER, SubCover
from freeprod.services.resolution import enumerate_quotients, word_source
from freeprod.utils import divisors, falling, mobius

logger = logging.getLogger(__name__)


# ── |Hom(C_q, S_N)| ─────────────────────────────────────────

class HomCountTable:
    """Append-only memo of h_q(N) = #{sigma in Sym(N) : sigma^q = id}."""

    def __init__(self, q: int):
        if q < 1:
            raise InvalidInputException(f"Cyclic order must be positive, got {q}")
        self.q = q
        self.values: List[int] = [1]
        self._lock = threading.RLock()

    def __getitem__(self, n: int) -> int:
        if n < 0:
            raise InvalidInputException(f"h_q(N) needs N >= 0, got {n}")
        if n < len(self.values):
            return self.values[n]
        with self._lock:
            ds = divisors(self.q)
            for k in range(len(self.values), n + 1):
                self.values.append(sum(falling(k - 1, d - 1) * self.values[k - d]
                                       for d in ds if d <= k))
            return self.values[n]


_tables: Dict[int, HomCountTable] = {}
_tables_lock = threading.Lock()


def hom_table(q: int) -> HomCountTable:
    with _tables_lock:
        if q not in _tables:
            _tables[q] = HomCountTable(q)
        return _tables[q]


def hom_count(q: int, n: int) -> int:
    return hom_table(q)[n]


# ── extension counts over a cyclic factor ───────────────────

@dataclass(frozen=True)
class CyclicProfile:
    arcs: Tuple[int, ...]
    cycles: Tuple[int, ...]

    @classmethod
    def of(cls, arcs, cycles) -> 'CyclicProfile':
        return cls(tuple(sorted(arcs)), tuple(sorted(cycles)))

    @classmethod
    def from_subcover(cls, z: SubCover, factor: int) -> 'CyclicProfile':
        arcs, cycles = z.cyclic_chains(factor)
        return cls.of((len(a) - 1 for a in arcs), (len(c) for c in cycles))

    @property
    def points(self) -> int:
        return sum(s + 1 for s in self.arcs) + sum(self.cycles)


@lru_cache(maxsize=8192)
def _arc_extensions(q: int, arcs: Tuple[int, ...], free: int) -> int:
    """Ways to complete placed arcs plus ``free`` untouched points to sigma^q = id."""
    if not arcs:
        return hom_count(q, free)
    head, rest = arcs[0], Counter(arcs[1:])
    lengths = sorted(rest)
    total = 0
    for picks in itertools.product(*(range(rest[s] + 1) for s in lengths)):
        ways = 1
        k = 1
        pts = head + 1
        remaining = []
        for s, c in zip(lengths, picks):
            ways *= comb(rest[s], c)
            k += c
            pts += c * (s + 1)
            remaining.extend([s] * (rest[s] - c))
        for d in divisors(q):
            f = d - pts
            if f < 0 or f > free:
                continue
            total += ways * comb(free, f) * factorial(f + k - 1) * \
                _arc_extensions(q, tuple(remaining), free - f)
    return total


def count_extensions(q: int, n: int, profile: CyclicProfile) -> int:
    if any(q % d for d in profile.cycles):
        raise InvalidInputException(f"Cycle lengths {profile.cycles} must divide {q}")
    if any(s > q - 1 for s in profile.arcs):
        raise InvalidInputException(f"Arcs over C{q} have at most {q - 1} edges")
    if profile.points > n:
        raise InvalidInputException(f"Profile needs {profile.points} points, N = {n}")
    return _arc_extensions(q, profile.arcs, n - profile.points)


# ── embedding expectations ──────────────────────────────────

def emb_expectation(z: SubCover, n: int) -> Fraction:
    """Expected number of injective lifts of ``z`` into a uniform random N-cover."""
    z.require_valid()
    if n < 0:
        raise InvalidInputException(f"N must be non-negative, got {n}")
    p = z.presentation
    o_count = len(z.vertices_in(O_FIBER))
    if o_count > n:
        return Fraction(0)
    value = Fraction(falling(n, o_count))
    for i, f in enumerate(p.factors):
        v = len(z.vertices_in(i))
        if v > n:
            return Fraction(0)
        e = len(z.edges_with((i, E_GEN)))
        value *= Fraction(falling(n, v), falling(n, e))
        if f.is_cyclic:
            value *= Fraction(count_extensions(f.size, n, CyclicProfile.from_subcover(z, i)),
                              hom_count(f.size, n))
        else:
            for g in range(f.rank):
                value /= falling(n, len(z.edges_with((i, g))))
    return value


def lift_expectation(source: SubCover, n: int, budget: Optional[int] = None) -> Fraction:
    """Expected number of (not necessarily injective) lifts of ``source``."""
    return sum((emb_expectation(q.codomain, n) for q in enumerate_quotients(source, budget)),
               Fraction(0))


def torsion_fix_expectation(q: int, j: int, n: int) -> Fraction:
    if not 1 <= j <= q - 1:
        raise InvalidInputException(f"Torsion exponent must satisfy 1 <= j <= q-1, got {j}")
    h = hom_table(q)
    total = Fraction(0)
    for d in divisors(q):
        if j % d or d > n:
            continue
        total += Fraction(falling(n, d) * h[n - d], h[n])
    return total


def fix_expectation(gamma: Word, n: int, budget: Optional[int] = None) -> Fraction:
    cls = classify(gamma)
    if cls.is_trivial:
        return Fraction(n)
    if cls.is_torsion:
        q = gamma.presentation.factors[cls.factor].size
        return torsion_fix_expectation(q, cls.exponent, n)
    return lift_expectation(word_source([cls.reduced]), n, budget)


def fix_moment(gamma: Word, r: int, n: int, budget: Optional[int] = None) -> Fraction:
    if r < 0:
        raise InvalidInputException(f"Moment order must be non-negative, got {r}")
    if r == 0:
        return Fraction(1)
    if r == 1:
        return fix_expectation(gamma, n, budget)
    return lift_expectation(word_source([gamma], r), n, budget)


def joint_fix_expectation(gamma1: Word, gamma2: Word, n: int,
                          budget: Optional[int] = None) -> Fraction:
    return lift_expectation(word_source([gamma1, gamma2]), n, budget)


def cyc_expectation(gamma: Word, length: int, n: int, budget: Optional[int] = None) -> Fraction:
    """Expected number of ``length``-cycles, by Moebius inversion over fixed points of powers."""
    if length < 1:
        raise InvalidInputException(f"Cycle length must be positive, got {length}")
    total = Fraction(0)
    for d in divisors(length):
        mu = mobius(length // d)
        if mu:
            total += mu * fix_expectation(gamma ** d, n, budget)
    return total / length


# ── empirical decay ─────────────────────────────────────────

def scaled_error(value: Fraction, limit: Fraction, n: int, exponent: float) -> float:
    """(value - limit) * N^exponent as a float."""
    return float(value - limit) * float(n) ** exponent


def correction_exponent(gamma: Word, grid: Sequence[int], subtract: Fraction,
                        budget: Optional[int] = None) -> float:
    """Least-squares slope of log|E[fix] - subtract| against log N."""
    points = [(n, abs(fix_expectation(gamma, n, budget) - subtract)) for n in grid]
    points = [(n, err) for n, err in points if n > 0 and err > 0]
    if len(points) < 2:
        raise InvalidInputException("Need two grid points with a nonzero error to fit a slope")
    xs = np.log([float(n) for n, _ in points])
    ys = np.log([float(err) for _, err in points])
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)
