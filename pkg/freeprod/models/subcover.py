"""
Sub-covers of the graph-of-spaces model X_Gamma, stored as labeled 1-skeleta.

Vertices are integers 0..n-1. ``fibers[v]`` is -1 for the o-fiber and i for
the fiber over the vertex space of factor i. An edge is (label, src, dst)
where label (i, -1) is the e_i edge o -> v_i and (i, g) is generator g of
factor i acting inside fiber i.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from freeprod.core.exceptions import InvalidInputException, PresentationMismatchException
from freeprod.models.group import Presentation, Syllable, Word, classify
from freeprod.models.group import is_cyclically_reduced

O_FIBER = -1
E_GEN = -1

BASED = 'based'
UNBASED = 'unbased'

Label = Tuple[int, int]
Edge = Tuple[Label, int, int]


@dataclass(frozen=True)
class ChiReport:
    total: Fraction
    per_component: Tuple[Tuple[int, Fraction], ...]


@dataclass(frozen=True)
class SubCover:
    presentation: Presentation
    fibers: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    basepoints: Tuple[int, ...] = ()

    @classmethod
    def build(cls, p: Presentation, fibers: Sequence[int], edges, basepoints=()) -> 'SubCover':
        return cls(p, tuple(fibers), tuple(sorted(set(edges))), tuple(basepoints))

    # ── structure ───────────────────────────────────────────

    @property
    def num_vertices(self) -> int:
        return len(self.fibers)

    @cached_property
    def label_universe(self) -> Tuple[Label, ...]:
        labels = []
        for i, f in enumerate(self.presentation.factors):
            labels.append((i, E_GEN))
            labels.extend((i, g) for g in range(f.rank))
        return tuple(labels)

    @cached_property
    def out_map(self) -> Dict[Label, Dict[int, int]]:
        table: Dict[Label, Dict[int, int]] = {lab: {} for lab in self.label_universe}
        for lab, s, d in self.edges:
            table.setdefault(lab, {})[s] = d
        return table

    @cached_property
    def in_map(self) -> Dict[Label, Dict[int, int]]:
        table: Dict[Label, Dict[int, int]] = {lab: {} for lab in self.label_universe}
        for lab, s, d in self.edges:
            table.setdefault(lab, {})[d] = s
        return table

    def vertices_in(self, fiber: int) -> List[int]:
        return [v for v, f in enumerate(self.fibers) if f == fiber]

    def edges_with(self, label: Label) -> List[Edge]:
        return [e for e in self.edges if e[0] == label]

    @cached_property
    def components(self) -> List[List[int]]:
        """Connected components, each sorted, ordered by smallest vertex."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.num_vertices))
        graph.add_edges_from((s, d) for _, s, d in self.edges)
        return sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])

    @cached_property
    def component_of(self) -> Dict[int, int]:
        return {v: k for k, comp in enumerate(self.components) for v in comp}

    def cyclic_chains(self, i: int) -> Tuple[List[List[int]], List[List[int]]]:
        """Arcs (maximal open chains, isolated vertices included) and closed
        cycles of the generator of cyclic factor i, as vertex sequences."""
        succ = self.out_map[(i, 0)]
        pred = self.in_map[(i, 0)]
        seen = set()
        arcs, cycles = [], []
        for v in self.vertices_in(i):
            if v in pred:
                continue
            chain = [v]
            while chain[-1] in succ:
                chain.append(succ[chain[-1]])
            seen.update(chain)
            arcs.append(chain)
        for v in self.vertices_in(i):
            if v in seen:
                continue
            cycle = [v]
            while succ[cycle[-1]] != v:
                cycle.append(succ[cycle[-1]])
            seen.update(cycle)
            cycles.append(cycle)
        return arcs, cycles

    # ── validity ────────────────────────────────────────────

    def problems(self) -> List[str]:
        p = self.presentation
        issues = []
        n = self.num_vertices
        for v, f in enumerate(self.fibers):
            if not O_FIBER <= f < len(p.factors):
                issues.append(f"vertex {v} lies in unknown fiber {f}")
        if issues:
            return issues
        seen_out, seen_in = set(), set()
        for lab, s, d in self.edges:
            i, g = lab
            if not (0 <= i < len(p.factors) and E_GEN <= g < p.factors[i].rank):
                issues.append(f"unknown label {lab}")
                continue
            if not (0 <= s < n and 0 <= d < n):
                issues.append(f"edge {lab} {s}->{d} leaves the vertex set")
                continue
            src_fiber = O_FIBER if g == E_GEN else i
            if self.fibers[s] != src_fiber or self.fibers[d] != i:
                issues.append(f"edge {lab} {s}->{d} crosses fibers")
            if (lab, s) in seen_out:
                issues.append(f"vertex {s} has two outgoing {lab} edges")
            if (lab, d) in seen_in:
                issues.append(f"vertex {d} has two incoming {lab} edges")
            seen_out.add((lab, s))
            seen_in.add((lab, d))
        if issues:
            return issues
        for i, f in enumerate(p.factors):
            if not f.is_cyclic:
                continue
            arcs, cycles = self.cyclic_chains(i)
            for arc in arcs:
                if len(arc) - 1 > f.size - 1:
                    issues.append(f"arc of {len(arc) - 1} edges over C{f.size}")
            for cycle in cycles:
                if f.size % len(cycle):
                    issues.append(f"cycle of length {len(cycle)} over C{f.size}")
        for b in self.basepoints:
            if not 0 <= b < n:
                issues.append(f"basepoint {b} is not a vertex")
        return issues

    @property
    def is_valid(self) -> bool:
        return not self.problems()

    def require_valid(self):
        issues = self.problems()
        if issues:
            raise InvalidInputException("Invalid sub-cover: " + "; ".join(issues))

    # ── serialization ───────────────────────────────────────

    def label_name(self, label: Label) -> str:
        i, g = label
        if g == E_GEN:
            return f"e{i}"
        return self.presentation.factors[i].names[g]

    def to_json(self) -> Dict:
        return {
            'group': str(self.presentation),
            'vertices': [{'id': v, 'fiber': 'o' if f == O_FIBER else f"v{f}"}
                         for v, f in enumerate(self.fibers)],
            'edges': [[self.label_name(lab), s, d] for lab, s, d in self.edges],
            'basepoints': list(self.basepoints),
        }


# ── shortest-word convention ────────────────────────────────

def syllable_steps(p: Presentation, syllable: Syllable) -> List[Tuple[Label, int]]:
    """Edge steps (label, +1 forward / -1 backward) spelling one syllable.

    x^t over C_q is min(t, q-t) edges, forward when 2t <= q.
    """
    i, payload = syllable
    f = p.factors[i]
    if f.is_cyclic:
        t = payload
        if 2 * t <= f.size:
            return [((i, 0), 1)] * t
        return [((i, 0), -1)] * (f.size - t)
    return [((i, abs(x) - 1), 1 if x > 0 else -1) for x in payload]


def build_Y(gamma: Word) -> SubCover:
    """The based circle Y_gamma whose lifts count fixed points of gamma."""
    p = gamma.presentation
    if gamma.is_trivial:
        raise InvalidInputException("Y_gamma is undefined for the trivial word")
    if not is_cyclically_reduced(gamma):
        raise InvalidInputException(f"{gamma} is not cyclically reduced")
    if len(gamma) == 1 and p.factors[gamma.syllables[0].factor].is_cyclic:
        raise InvalidInputException(f"{gamma} is torsion; use the torsion lift cover")

    if len(gamma) == 1:
        i, letters = gamma.syllables[0]
        n = len(letters)
        edges = []
        for k, (lab, direction) in enumerate(syllable_steps(p, gamma.syllables[0])):
            a, b = k, (k + 1) % n
            edges.append((lab, a, b) if direction > 0 else (lab, b, a))
        return SubCover.build(p, [i] * n, edges, (0,))

    ell = len(gamma)
    fibers = [O_FIBER] * ell
    edges = []
    for j, syl in enumerate(gamma.syllables):
        i = syl.factor
        steps = syllable_steps(p, syl)
        path = list(range(len(fibers), len(fibers) + len(steps) + 1))
        fibers.extend([i] * len(path))
        edges.append(((i, E_GEN), j, path[0]))
        for k, (lab, direction) in enumerate(steps):
            a, b = path[k], path[k + 1]
            edges.append((lab, a, b) if direction > 0 else (lab, b, a))
        edges.append(((i, E_GEN), (j + 1) % ell, path[-1]))
    return SubCover.build(p, fibers, edges, (0,))


def lift_cover(gamma: Word) -> SubCover:
    """Sub-cover whose injective lifts are the fixed points of gamma, for any gamma.

    Trivial words lift as a single o-vertex, torsion x^j over C_q as the closed
    gcd(j, q)-cycle, everything else as Y of the cyclic reduction.
    """
    p = gamma.presentation
    cls = classify(gamma)
    if cls.is_trivial:
        return SubCover.build(p, [O_FIBER], [], (0,))
    if cls.is_torsion:
        q = p.factors[cls.factor].size
        g = q // cls.order
        edges = [((cls.factor, 0), k, (k + 1) % g) for k in range(g)]
        return SubCover.build(p, [cls.factor] * g, edges, (0,))
    return build_Y(cls.reduced)


def close_forced_arcs(z: SubCover) -> SubCover:
    """Close every arc of q-1 edges over C_q into its q-cycle."""
    extra = []
    for i, f in enumerate(z.presentation.factors):
        if not f.is_cyclic:
            continue
        arcs, _ = z.cyclic_chains(i)
        extra.extend(((i, 0), arc[-1], arc[0]) for arc in arcs if len(arc) == f.size)
    if not extra:
        return z
    return SubCover.build(z.presentation, z.fibers, z.edges + tuple(extra), z.basepoints)


def disjoint_union(sources: Sequence[SubCover]) -> SubCover:
    if not sources:
        raise InvalidInputException("disjoint_union needs at least one sub-cover")
    p = sources[0].presentation
    fibers, edges, basepoints = [], [], []
    for z in sources:
        if z.presentation != p:
            raise PresentationMismatchException("Cannot unite sub-covers over different presentations")
        offset = len(fibers)
        fibers.extend(z.fibers)
        edges.extend((lab, s + offset, d + offset) for lab, s, d in z.edges)
        basepoints.extend(b + offset for b in z.basepoints)
    return SubCover.build(p, fibers, edges, basepoints)


# ── Euler characteristic ────────────────────────────────────

def chi_grp(z: SubCover) -> ChiReport:
    z.require_valid()
    p = z.presentation
    comp = z.component_of
    acc: Dict[int, Fraction] = {k: Fraction(0) for k in range(len(z.components))}
    for v, f in enumerate(z.fibers):
        if f == O_FIBER:
            acc[comp[v]] += 1
    for i, f in enumerate(p.factors):
        acc_e = z.edges_with((i, E_GEN))
        for _, s, _ in acc_e:
            acc[comp[s]] -= 1
        if f.is_cyclic:
            arcs, cycles = z.cyclic_chains(i)
            for arc in arcs:
                acc[comp[arc[0]]] += 1
            for cycle in cycles:
                acc[comp[cycle[0]]] += Fraction(len(cycle), f.size)
        else:
            for v in z.vertices_in(i):
                acc[comp[v]] += 1
            for lab, s, _ in z.edges:
                if lab[0] == i and lab[1] != E_GEN:
                    acc[comp[s]] -= 1
    per = tuple(sorted(acc.items()))
    return ChiReport(sum((c for _, c in per), Fraction(0)), per)


# ── canonical forms ─────────────────────────────────────────

def _neighbours(z: SubCover, v: int):
    for lab in z.label_universe:
        w = z.out_map[lab].get(v)
        if w is not None:
            yield lab, 1, w
        w = z.in_map[lab].get(v)
        if w is not None:
            yield lab, -1, w


def _traverse(z: SubCover, start: int) -> Tuple[tuple, Dict[int, int]]:
    """Deterministic BFS numbering from ``start``; the code is a complete
    invariant of the based component because every vertex has at most one
    neighbour per (label, direction)."""
    num = {start: 0}
    order = [start]
    k = 0
    while k < len(order):
        v = order[k]
        k += 1
        for _, _, w in _neighbours(z, v):
            if w not in num:
                num[w] = len(order)
                order.append(w)
    fibers = tuple(z.fibers[v] for v in order)
    edges = tuple(sorted((lab, num[s], num[d]) for lab, s, d in z.edges if s in num))
    return (fibers, edges), num


def _refined_colors(z: SubCover, vertices: List[int]) -> Dict[int, int]:
    colors = {v: z.fibers[v] + 1 for v in vertices}
    classes = len(set(colors.values()))
    while True:
        sigs = {v: (colors[v], tuple((lab, d, colors[w]) for lab, d, w in _neighbours(z, v)))
                for v in vertices}
        ranking = {sig: r for r, sig in enumerate(sorted(set(sigs.values())))}
        colors = {v: ranking[sigs[v]] for v in vertices}
        if len(ranking) == classes:
            return colors
        classes = len(ranking)


def _start_candidates(z: SubCover, vertices: List[int]) -> List[int]:
    colors = _refined_colors(z, vertices)
    best = min(colors.values())
    return [v for v in vertices if colors[v] == best]


def _unbased_code(z: SubCover, vertices: List[int]) -> tuple:
    return min(_traverse(z, s)[0] for s in _start_candidates(z, vertices))


def _encode(payload) -> bytes:
    return json.dumps(payload, separators=(',', ':')).encode()


def canonical_form(z: SubCover, mode: str = BASED) -> bytes:
    """Signature equal for two sub-covers iff they are label- and
    fiber-preserving isomorphic (mapping basepoints in order in BASED mode)."""
    comps = z.components
    if mode == BASED and z.basepoints:
        based_codes, positions, numbering = [], [], {}
        for b in z.basepoints:
            c = z.component_of[b]
            if c not in numbering:
                code, num = _traverse(z, b)
                numbering[c] = (len(based_codes), num)
                based_codes.append(code)
            rank, num = numbering[c]
            positions.append([rank, num[b]])
        rest = sorted(_unbased_code(z, comp) for k, comp in enumerate(comps) if k not in numbering)
        return _encode([BASED, based_codes, positions, rest])
    return _encode([UNBASED, sorted(_unbased_code(z, comp) for comp in comps)])


def automorphism_count(z: SubCover) -> int:
    if len(z.components) != 1:
        raise InvalidInputException("automorphism_count needs a connected sub-cover")
    vertices = z.components[0]
    candidates = _start_candidates(z, vertices)
    reference = _traverse(z, candidates[0])[0]
    return sum(1 for v in candidates if _traverse(z, v)[0] == reference)


# ── subgroup labels ─────────────────────────────────────────

def _label_word(p: Presentation, label: Label) -> Word:
    i, g = label
    if g == E_GEN:
        return p.identity()
    return Word.from_letters(p, [(i, g, 1)])


def spanning_prefixes(z: SubCover, base: int) -> Tuple[Dict[int, Word], set]:
    """Words read along a BFS spanning tree from ``base``, plus the tree edges."""
    p = z.presentation
    prefix = {base: p.identity()}
    tree = set()
    queue = [base]
    k = 0
    while k < len(queue):
        v = queue[k]
        k += 1
        for lab, direction, w in _neighbours(z, v):
            if w in prefix:
                continue
            step = _label_word(p, lab)
            prefix[w] = prefix[v] * (step if direction > 0 else step.inverse())
            tree.add((lab, v, w) if direction > 0 else (lab, w, v))
            queue.append(w)
    return prefix, tree


def plab_generators(z: SubCover, base: int) -> List[Word]:
    if not 0 <= base < z.num_vertices:
        raise InvalidInputException(f"Vertex {base} is not in the sub-cover")
    p = z.presentation
    prefix, tree = spanning_prefixes(z, base)
    gens: List[Word] = []
    for lab, s, d in z.edges:
        if s not in prefix or (lab, s, d) in tree:
            continue
        g = prefix[s] * _label_word(p, lab) * prefix[d].inverse()
        if not g.is_trivial and g not in gens:
            gens.append(g)
    return gens


def trace_word(z: SubCover, start: int, w: Word) -> Optional[int]:
    """Follow the path spelling ``w`` from ``start``; None when an edge is missing.

    From an o-vertex each syllable is e-edge, shortest-word path, e-edge back.
    From a fiber vertex ``w`` must live in that factor.
    """
    p = z.presentation
    cur = start
    for syl in w.syllables:
        from_o = z.fibers[cur] == O_FIBER
        if from_o:
            cur = z.out_map[(syl.factor, E_GEN)].get(cur)
            if cur is None:
                return None
        elif z.fibers[cur] != syl.factor:
            return None
        for lab, direction in syllable_steps(p, syl):
            table = z.out_map[lab] if direction > 0 else z.in_map[lab]
            cur = table.get(cur)
            if cur is None:
                return None
        if from_o:
            cur = z.in_map[(syl.factor, E_GEN)].get(cur)
            if cur is None:
                return None
    return cur
