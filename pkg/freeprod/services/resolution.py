"""
Resolution search: every isomorphism class of valid sub-cover quotients of a source.

A quotient is a partition of the source vertices merging only within fibers,
whose induced labeled graph is again a valid sub-cover. The search walks the
vertices in order and either joins each vertex to an already placed block or
opens a new block kept apart from all placed blocks. After every decision the
partition is closed under folding (equal labels out of, or into, one block
force their other ends together) and under cyclic saturation (a forward path
of q generator edges over C_q must close). Closed partitions are valid unless
two separated blocks were forced together, so conflicts prune whole subtrees
and every valid partition is reached by exactly one leaf.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from freeprod.config import get_config
from freeprod.core.cache import resolution_cache
from freeprod.core.exceptions import BudgetExceededException, InvalidInputException
from freeprod.models.group import Word
from freeprod.models.subcover import (
    BASED, SubCover, canonical_form, chi_grp, close_forced_arcs, disjoint_union, lift_cover,
)

logger = logging.getLogger(__name__)


class _Conflict:
    """Returned by fold_closure when no valid quotient contains the seeds."""

    def __repr__(self):
        return 'CONFLICT'

    def __bool__(self):
        return False


CONFLICT = _Conflict()

Partition = Tuple[int, ...]


@dataclass(frozen=True)
class Quotient:
    source: SubCover
    partition: Partition
    codomain: SubCover
    base_images: Tuple[int, ...]

    @cached_property
    def signature(self) -> bytes:
        return canonical_form(self.codomain, BASED)

    @cached_property
    def chi(self):
        return chi_grp(self.codomain).total

    @property
    def is_identity(self) -> bool:
        return len(set(self.partition)) == len(self.partition)


# ── union-find with labels ──────────────────────────────────

class _MergeState:
    """Union-find over source vertices tracking per-block label maps and separations."""

    __slots__ = ('source', 'parent', 'out', 'inn', 'apart', 'cyclic')

    def __init__(self, source: SubCover):
        self.source = source
        n = source.num_vertices
        self.parent = list(range(n))
        self.out: List[Optional[Dict]] = [{} for _ in range(n)]
        self.inn: List[Optional[Dict]] = [{} for _ in range(n)]
        self.apart: List[Optional[set]] = [set() for _ in range(n)]
        for lab, s, d in source.edges:
            self.out[s][lab] = d
            self.inn[d][lab] = s
        self.cyclic = [(i, f.size, source.vertices_in(i))
                       for i, f in enumerate(source.presentation.factors) if f.is_cyclic]

    def copy(self) -> '_MergeState':
        other = _MergeState.__new__(_MergeState)
        other.source = self.source
        other.parent = self.parent[:]
        other.out = [dict(d) if d is not None else None for d in self.out]
        other.inn = [dict(d) if d is not None else None for d in self.inn]
        other.apart = [set(s) if s is not None else None for s in self.apart]
        other.cyclic = self.cyclic
        return other

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def merge(self, pairs: Iterable[Tuple[int, int]]) -> bool:
        fibers = self.source.fibers
        queue = list(pairs)
        while queue:
            a, b = queue.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if fibers[a] != fibers[b] or b in self.apart[a]:
                return False
            if a > b:
                a, b = b, a
            self.parent[b] = a
            for table in (self.out, self.inn):
                mine = table[a]
                for lab, t in table[b].items():
                    if lab in mine:
                        queue.append((mine[lab], t))
                    else:
                        mine[lab] = t
                table[b] = None
            theirs = self.apart[b]
            for x in theirs:
                self.apart[x].discard(b)
                self.apart[x].add(a)
            self.apart[a] |= theirs
            self.apart[b] = None
        return True

    def saturate(self) -> bool:
        while True:
            forced = []
            for i, q, members in self.cyclic:
                lab = (i, 0)
                for v in members:
                    if self.parent[v] != v:
                        continue
                    cur = v
                    for _ in range(q):
                        nxt = self.out[cur].get(lab)
                        if nxt is None:
                            cur = None
                            break
                        cur = self.find(nxt)
                    if cur is not None and cur != v:
                        forced.append((v, cur))
            if not forced:
                return True
            if not self.merge(forced):
                return False

    def separate(self, v: int, others: Iterable[int]):
        v = self.find(v)
        for w in others:
            w = self.find(w)
            self.apart[v].add(w)
            self.apart[w].add(v)

    def partition(self) -> Partition:
        blocks: Dict[int, int] = {}
        return tuple(blocks.setdefault(self.find(v), len(blocks)) for v in range(len(self.parent)))


def quotient_subcover(source: SubCover, partition: Partition) -> SubCover:
    size = max(partition) + 1 if partition else 0
    fibers = [0] * size
    for v, b in enumerate(partition):
        fibers[b] = source.fibers[v]
    edges = {(lab, partition[s], partition[d]) for lab, s, d in source.edges}
    return SubCover.build(source.presentation, fibers, edges,
                          tuple(partition[b] for b in source.basepoints))


def make_quotient(source: SubCover, partition: Partition) -> Quotient:
    raw = quotient_subcover(source, partition)
    codomain = close_forced_arcs(raw)
    return Quotient(source, partition, codomain, codomain.basepoints)


# ── operations ──────────────────────────────────────────────

def fold_closure(source: SubCover, seeds: Sequence[Tuple[int, int]],
                 relators: bool = False) -> Union[Partition, _Conflict]:
    """Smallest partition containing ``seeds`` whose quotient is an immersion.

    Returns CONFLICT when that quotient is not a valid sub-cover (a cycle length
    not dividing q, an arc of q or more edges, or a forced cross-fiber merge).
    With ``relators=True`` cyclic saturation is applied as well, so the result is
    the smallest valid quotient containing the seeds.
    """
    n = source.num_vertices
    for a, b in seeds:
        if not (0 <= a < n and 0 <= b < n):
            raise InvalidInputException(f"Seed pair ({a}, {b}) is not in the sub-cover")
    state = _MergeState(source)
    if not state.merge(seeds):
        return CONFLICT
    if relators and not state.saturate():
        return CONFLICT
    partition = state.partition()
    if not quotient_subcover(source, partition).is_valid:
        return CONFLICT
    return partition


def _search(source: SubCover, budget: int) -> List[Partition]:
    root = _MergeState(source)
    if not root.saturate():
        return []
    fibers = source.fibers
    n = source.num_vertices
    leaves: List[Partition] = []
    stack = [(root, 0)]
    nodes = 0
    while stack:
        state, k = stack.pop()
        nodes += 1
        if nodes > budget:
            logger.warning("Resolution search stopped after %d nodes on %d vertices", budget, n)
            raise BudgetExceededException('merge-tree node', budget)
        # skip vertices whose block already holds a placed vertex
        while k < n and any(state.find(u) == state.find(k) for u in range(k)):
            k += 1
        if k == n:
            leaves.append(state.partition())
            continue
        placed = sorted({state.find(u) for u in range(k) if fibers[u] == fibers[k]})
        children = []
        for block in placed:
            child = state.copy()
            if child.merge([(k, block)]) and child.saturate():
                children.append((child, k + 1))
        fresh = state.copy()
        fresh.separate(k, placed)
        children.append((fresh, k + 1))
        stack.extend(reversed(children))
    logger.debug("Resolution search visited %d nodes, %d quotients", nodes, len(leaves))
    return leaves


def enumerate_quotients(source: SubCover, budget: Optional[int] = None,
                        use_cache: bool = True) -> List[Quotient]:
    """All isomorphism classes of valid quotients of ``source``, sorted by signature."""
    source.require_valid()
    budget = budget if budget is not None else get_config().MERGE_BUDGET

    def compute():
        quotients = {}
        for partition in _search(source, budget):
            q = make_quotient(source, partition)
            quotients.setdefault(q.signature, q)
        return [quotients[sig] for sig in sorted(quotients)]

    if not use_cache:
        return compute()
    key = (source.presentation, source.fibers, source.edges, source.basepoints)
    return list(resolution_cache.get_or_compute(key, compute, get_config().CACHE_TTL))


def word_source(words: Sequence[Word], copies: int = 1) -> SubCover:
    """Disjoint union of ``copies`` lift covers of each word, in order."""
    if not words or copies < 1:
        raise InvalidInputException("Need at least one word and one copy")
    return disjoint_union([lift_cover(w) for w in words for _ in range(copies)])


def resolution(gamma: Word, copies: int = 1, budget: Optional[int] = None) -> List[Quotient]:
    """R_gamma (``copies`` = 1) or R_{gamma,r} as sorted quotient classes."""
    return enumerate_quotients(word_source([gamma], copies), budget)


def zero_quotients(quotients: Iterable[Quotient]) -> List[Quotient]:
    return [q for q in quotients if q.chi == 0]


__all__ = [
    'CONFLICT', 'Quotient', 'fold_closure', 'enumerate_quotients', 'disjoint_union',
    'make_quotient', 'resolution', 'word_source', 'zero_quotients',
]
