"""
Limit laws of gamma-random permutation statistics.

The zero-Euler-characteristic quotients of the lift cover of gamma are in
bijection with the subgroups H_gamma that govern the limit: their number is
the limit of E[fix], their grouping into conjugacy classes gives the Poisson
mixture, and filtering them by the least power of gamma they contain gives
the cycle-count limits.
"""

import logging
from collections import Counter, OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
from scipy.stats import poisson

from freeprod.config import get_config
from freeprod.core.exceptions import InvalidInputException
from freeprod.models.group import ElementClass, Word, classify, is_cyclically_reduced
from freeprod.models.subcover import (
    E_GEN, O_FIBER, UNBASED, SubCover, automorphism_count, canonical_form, spanning_prefixes,
    trace_word,
)
from freeprod.services.resolution import Quotient, enumerate_quotients, word_source, zero_quotients
from freeprod.utils import stirling2

logger = logging.getLogger(__name__)

INFINITE_CYCLIC = 'infinite_cyclic'
INFINITE_DIHEDRAL = 'infinite_dihedral'


@dataclass(frozen=True)
class ZeroSubgroup:
    kind: str
    generators: Tuple[Word, ...]
    codomain: SubCover
    basepoint: int
    traced: Word
    conjugator: Word

    @cached_property
    def signature(self) -> bytes:
        return canonical_form(self.codomain, UNBASED)

    @property
    def is_cyclic(self) -> bool:
        return self.kind == INFINITE_CYCLIC

    def describe(self) -> str:
        return '<' + ', '.join(g.to_text() for g in self.generators) + '>'


@dataclass(frozen=True)
class ConjugacyClass:
    representative: ZeroSubgroup
    alpha: int
    beta: int
    members: Tuple[ZeroSubgroup, ...]


@dataclass(frozen=True)
class PoissonMixture:
    """scale * sum of alpha*beta*Poi(1/beta) over independent terms."""
    terms: Tuple[Tuple[int, int], ...]
    scale: Fraction = Fraction(1)

    @property
    def mean(self) -> Fraction:
        return self.scale * sum(alpha for alpha, _ in self.terms)

    def describe(self) -> str:
        if not self.terms:
            return '0'
        parts = [f"{alpha * beta}*Poi(1/{beta})" if beta > 1 else f"{alpha}*Poi(1)"
                 for alpha, beta in self.terms]
        body = ' + '.join(parts)
        return body if self.scale == 1 else f"({self.scale})*({body})"


@dataclass(frozen=True)
class Independence:
    independent: bool
    witness: Optional[SubCover] = None


# ── graph-of-spaces structure of a connected codomain ───────

def _vertex_spaces(z: SubCover) -> Tuple[int, List[Tuple[int, List[int], int]]]:
    """Free rank of pi_1 and its finite vertex groups as (factor, cycle, order)."""
    p = z.presentation
    nodes = len(z.vertices_in(O_FIBER))
    free_rank = 0
    torsion = []
    for i, f in enumerate(p.factors):
        if f.is_cyclic:
            arcs, cycles = z.cyclic_chains(i)
            nodes += len(arcs) + len(cycles)
            torsion.extend((i, c, f.size // len(c)) for c in cycles if len(c) < f.size)
        else:
            graph = nx.MultiGraph()
            graph.add_nodes_from(z.vertices_in(i))
            graph.add_edges_from((s, d) for lab, s, d in z.edges if lab[0] == i and lab[1] != E_GEN)
            comps = nx.number_connected_components(graph)
            nodes += comps
            free_rank += graph.number_of_edges() - graph.number_of_nodes() + comps
    e_edges = sum(1 for lab, _, _ in z.edges if lab[1] == E_GEN)
    free_rank += e_edges - nodes + 1
    return free_rank, torsion


def _closing_power(z: SubCover, base: int, w: Word, limit: int) -> Optional[int]:
    cur = base
    for k in range(1, limit + 1):
        cur = trace_word(z, cur, w)
        if cur is None:
            return None
        if cur == base:
            return k
    return None


def _zero_subgroup(q: Quotient, traced: Word, conjugator: Word, cls: ElementClass) -> ZeroSubgroup:
    z = q.codomain
    base = q.base_images[0]
    p = z.presentation
    free_rank, torsion = _vertex_spaces(z)
    conj_inv = conjugator.inverse()
    if free_rank == 1 and not torsion:
        j = _closing_power(z, base, cls.root, z.num_vertices + 1)
        if j is None:
            raise InvalidInputException(f"Root {cls.root} does not close in its codomain")
        gen = conjugator * cls.root ** j * conj_inv
        return ZeroSubgroup(INFINITE_CYCLIC, (gen,), z, base, traced, conjugator)
    if free_rank == 0 and sorted(order for _, _, order in torsion) == [2, 2]:
        prefix, _ = spanning_prefixes(z, base)
        gens = []
        for i, cycle, _ in torsion:
            w = cycle[0]
            loop = Word.from_letters(p, [(i, 0, len(cycle))])
            gens.append(conjugator * prefix[w] * loop * prefix[w].inverse() * conj_inv)
        gens.sort(key=lambda g: (len(g.to_text()), g.to_text()))
        return ZeroSubgroup(INFINITE_DIHEDRAL, tuple(gens), z, base, traced, conjugator)
    raise InvalidInputException(
        f"Codomain with free rank {free_rank} and torsion {[o for _, _, o in torsion]} "
        "is not an Euler-characteristic-zero subgroup")


def _require_infinite(gamma: Word) -> ElementClass:
    cls = classify(gamma)
    if not cls.is_infinite:
        raise InvalidInputException(f"{gamma} has finite order; this statistic needs infinite order")
    return cls


def _zero_subgroups(traced: Word, conjugator: Word, cls: ElementClass,
                    budget: Optional[int]) -> List[ZeroSubgroup]:
    quotients = zero_quotients(enumerate_quotients(word_source([traced]), budget))
    return [_zero_subgroup(q, traced, conjugator, cls) for q in quotients]


# ── H_gamma and its conjugacy classes ───────────────────────

def h_gamma(gamma: Word, budget: Optional[int] = None) -> List[ZeroSubgroup]:
    cls = _require_infinite(gamma)
    return _zero_subgroups(cls.reduced, cls.conjugator, cls, budget)


def conjugacy_classes(subs: Sequence[ZeroSubgroup]) -> List[ConjugacyClass]:
    groups: Dict[bytes, List[ZeroSubgroup]] = OrderedDict()
    for h in subs:
        groups.setdefault(h.signature, []).append(h)
    classes = [ConjugacyClass(members[0], len(members), automorphism_count(members[0].codomain),
                              tuple(members))
               for members in groups.values()]
    classes.sort(key=lambda c: (-c.beta, c.alpha, c.representative.signature))
    return classes


def mixture_of(classes: Sequence[ConjugacyClass], scale: Fraction = Fraction(1)) -> PoissonMixture:
    return PoissonMixture(tuple((c.alpha, c.beta) for c in classes), Fraction(scale))


def limit_distribution(gamma: Word, budget: Optional[int] = None) -> PoissonMixture:
    return mixture_of(conjugacy_classes(h_gamma(gamma, budget)))


# ── moments and pmf of Poisson mixtures ─────────────────────

def _term_moments(weight: Fraction, beta: int, r: int) -> List[Fraction]:
    return [weight ** k * sum((stirling2(k, j) * Fraction(1, beta ** j) for j in range(k + 1)),
                              Fraction(0))
            for k in range(r + 1)]


def mixture_moment(mix: PoissonMixture, r: int) -> Fraction:
    if r < 0:
        raise InvalidInputException(f"Moment order must be non-negative, got {r}")
    moments = [Fraction(1)] + [Fraction(0)] * r
    for alpha, beta in mix.terms:
        term = _term_moments(mix.scale * alpha * beta, beta, r)
        moments = [sum((comb(k, a) * moments[a] * term[k - a] for a in range(k + 1)), Fraction(0))
                   for k in range(r + 1)]
    return moments[r]


def mixture_pmf(mix: PoissonMixture, tail: Optional[float] = None) -> Dict[Union[int, Fraction], float]:
    """Distribution of the mixture, each Poisson truncated once its tail mass drops below ``tail``."""
    tail = tail if tail is not None else get_config().MIXTURE_TAIL
    pmf: Dict[Fraction, float] = {Fraction(0): 1.0}
    share = tail / max(len(mix.terms), 1)
    for alpha, beta in mix.terms:
        mu = 1.0 / beta
        top = int(poisson.isf(share, mu)) + 1
        weight = mix.scale * alpha * beta
        term = {weight * k: float(poisson.pmf(k, mu)) for k in range(top + 1)}
        merged: Dict[Fraction, float] = {}
        for x, px in pmf.items():
            for y, py in term.items():
                merged[x + y] = merged.get(x + y, 0.0) + px * py
        pmf = merged
    return {(int(k) if k.denominator == 1 else k): v for k, v in sorted(pmf.items())}


def limit_moment_via_resolution(gamma: Word, r: int, budget: Optional[int] = None) -> int:
    cls = _require_infinite(gamma)
    if r < 1:
        raise InvalidInputException(f"Moment order must be positive, got {r}")
    return len(zero_quotients(enumerate_quotients(word_source([cls.reduced], r), budget)))


# ── powers, cycles, independence ────────────────────────────

def minimal_power_in(gamma: Word, h: ZeroSubgroup) -> int:
    """Least L >= 1 with gamma^L in ``h``, by tracing gamma from the basepoint."""
    delta = h.conjugator.inverse() * gamma * h.conjugator
    if delta.is_trivial or not is_cyclically_reduced(delta):
        raise InvalidInputException(f"{gamma} cannot be traced in {h.describe()}")
    found = _closing_power(h.codomain, h.basepoint, delta, h.codomain.num_vertices + 1)
    if found is None:
        raise InvalidInputException(f"No power of {gamma} lies in {h.describe()}")
    return found


def h_gamma_L(gamma: Word, length: int, budget: Optional[int] = None) -> List[ZeroSubgroup]:
    if length < 1:
        raise InvalidInputException(f"Power must be positive, got {length}")
    cls = _require_infinite(gamma)
    subs = _zero_subgroups(cls.reduced ** length, cls.conjugator, cls, budget)
    return [h for h in subs if minimal_power_in(gamma, h) == length]


def cyc_limit(gamma: Word, length: int, budget: Optional[int] = None) -> Tuple[Fraction, PoissonMixture]:
    subs = h_gamma_L(gamma, length, budget)
    mix = mixture_of(conjugacy_classes(subs), Fraction(1, length))
    return Fraction(len(subs), length), mix


def asymptotically_independent(gamma1: Word, gamma2: Word,
                               budget: Optional[int] = None) -> Independence:
    first = {h.signature: h for h in h_gamma(gamma1, budget)}
    for h in h_gamma(gamma2, budget):
        if h.signature in first:
            return Independence(False, first[h.signature].codomain)
    return Independence(True)


def rf_bound(gamma: Word, r: int, n: int, budget: Optional[int] = None) -> Fraction:
    """Leading bound c_r / N^r on P[phi(gamma) = id]."""
    if n < 1:
        raise InvalidInputException(f"N must be positive, got {n}")
    return mixture_moment(limit_distribution(gamma, budget), r) / Fraction(n) ** r


def chi_spectrum(gamma: Word, budget: Optional[int] = None) -> List[Tuple[Fraction, int]]:
    """Multiset of Euler characteristics over the resolution of gamma, largest first."""
    cls = classify(gamma)
    if cls.is_trivial:
        raise InvalidInputException("The trivial word has no resolution spectrum")
    counts = Counter(q.chi for q in enumerate_quotients(word_source([gamma]), budget))
    return sorted(counts.items(), key=lambda kv: -kv[0])
