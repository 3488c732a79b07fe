from fractions import Fraction

import pytest

from freeprod.core.exceptions import InvalidInputException, PresentationMismatchException
from freeprod.models.group import Presentation
from freeprod.models.subcover import (
    BASED, E_GEN, O_FIBER, UNBASED, SubCover, automorphism_count, build_Y, canonical_form,
    chi_grp, close_forced_arcs, disjoint_union, lift_cover, plab_generators, syllable_steps,
    trace_word,
)


def _relabel(z: SubCover, shift: int) -> SubCover:
    n = z.num_vertices
    new = [(v + shift) % n for v in range(n)]
    fibers = [0] * n
    for v, f in enumerate(z.fibers):
        fibers[new[v]] = f
    edges = [(lab, new[s], new[d]) for lab, s, d in z.edges]
    return SubCover.build(z.presentation, fibers, edges, [new[b] for b in z.basepoints])


class TestBuildY:
    def test_circle_shape(self, c2c2):
        y = build_Y(c2c2.word('abab'))
        assert len(y.vertices_in(O_FIBER)) == 4
        assert y.num_vertices == 12
        assert len(y.edges) == 12
        assert y.basepoints == (0,)
        assert y.is_valid

    def test_circle_has_zero_chi(self, c2c3, f2):
        assert chi_grp(build_Y(c2c3.word('a*b*a*b^-1'))).total == 0
        assert chi_grp(build_Y(f2.word('a*b*a^-1*b^-1'))).total == 0

    def test_shortest_word_convention(self):
        p = Presentation.parse('C5*C2')
        assert syllable_steps(p, (0, 2)) == [((0, 0), 1)] * 2
        assert syllable_steps(p, (0, 3)) == [((0, 0), -1)] * 2
        # ties go forward
        q = Presentation.parse('C4')
        assert syllable_steps(q, (0, 2)) == [((0, 0), 1)] * 2

    def test_rejects(self, c2c2, c2c3):
        with pytest.raises(InvalidInputException):
            build_Y(c2c2.identity())
        with pytest.raises(InvalidInputException):
            build_Y(c2c2.word('a'))
        with pytest.raises(InvalidInputException):
            build_Y(c2c3.word('a*b*a'))

    def test_free_single_syllable(self, f2):
        y = build_Y(f2.word('a*b*a^-1*b^-1'))
        assert y.num_vertices == 4
        assert set(y.fibers) == {0}
        assert len(y.edges) == 4


class TestLiftCover:
    def test_trivial_word_is_one_point(self, c2c2):
        z = lift_cover(c2c2.identity())
        assert z.fibers == (O_FIBER,)
        assert z.edges == ()

    def test_torsion_word_is_closed_cycle(self):
        p = Presentation.parse('C4')
        z = lift_cover(p.word('a^2'))
        assert z.num_vertices == 2
        assert len(z.edges) == 2
        assert chi_grp(z).total == Fraction(1, 2)

    def test_conjugates_reduce(self, c2c3):
        # b * (a*b*a*b^-1) * b^-1
        z = lift_cover(c2c3.word('b*a*b*a*b'))
        assert z == build_Y(c2c3.word('a*b*a*b^-1'))


class TestValidity:
    def test_cycle_length_must_divide(self):
        p = Presentation.parse('C3')
        bad = SubCover.build(p, [0, 0], [((0, 0), 0, 1), ((0, 0), 1, 0)])
        assert not bad.is_valid
        with pytest.raises(InvalidInputException):
            bad.require_valid()

    def test_long_arc(self):
        p = Presentation.parse('C3')
        arc = SubCover.build(p, [0, 0, 0, 0], [((0, 0), 0, 1), ((0, 0), 1, 2), ((0, 0), 2, 3)])
        assert any('arc' in issue for issue in arc.problems())

    def test_cross_fiber_and_duplicate_labels(self, c2c2):
        crossing = SubCover.build(c2c2, [O_FIBER, 1], [((0, E_GEN), 0, 1)])
        assert not crossing.is_valid
        doubled = SubCover.build(c2c2, [O_FIBER, 0, 0], [((0, E_GEN), 0, 1), ((0, E_GEN), 0, 2)])
        assert not doubled.is_valid

    def test_forced_arc_closes(self):
        p = Presentation.parse('C3')
        z = close_forced_arcs(SubCover.build(p, [0, 0, 0], [((0, 0), 0, 1), ((0, 0), 1, 2)]))
        arcs, cycles = z.cyclic_chains(0)
        assert arcs == []
        assert cycles == [[0, 1, 2]]
        assert chi_grp(z).total == 1


class TestCanonicalForm:
    def test_relabeling_invariance(self, c2c3):
        y = build_Y(c2c3.word('a*b*a*b^-1'))
        moved = _relabel(y, 5)
        assert canonical_form(y, BASED) == canonical_form(moved, BASED)
        assert canonical_form(y, UNBASED) == canonical_form(moved, UNBASED)

    def test_basepoint_matters(self, c2c3):
        y = build_Y(c2c3.word('a*b*a*b^-1'))
        rebased = SubCover.build(y.presentation, y.fibers, y.edges, (1,))
        assert canonical_form(y, UNBASED) == canonical_form(rebased, UNBASED)
        assert canonical_form(y, BASED) != canonical_form(rebased, BASED)

    def test_different_words_differ(self, c2c3):
        a = build_Y(c2c3.word('a*b*a*b^-1'))
        b = build_Y(c2c3.word('a*b*a*b'))
        assert canonical_form(a, UNBASED) != canonical_form(b, UNBASED)

    def test_automorphisms(self, c2c2):
        assert automorphism_count(build_Y(c2c2.word('abab'))) == 2
        assert automorphism_count(close_forced_arcs(build_Y(c2c2.word('(ab)^3')))) == 6

    def test_automorphisms_need_connected(self, c2c2):
        y = build_Y(c2c2.word('ab'))
        with pytest.raises(InvalidInputException):
            automorphism_count(disjoint_union([y, y]))


class TestReading:
    def test_plab_generator_is_the_word(self, c2c2):
        w = c2c2.word('abab')
        assert plab_generators(build_Y(w), 0) in ([w], [w.inverse()])

    def test_plab_rejects_missing_base(self, c2c2):
        with pytest.raises(InvalidInputException):
            plab_generators(build_Y(c2c2.word('ab')), 99)

    def test_trace(self, c2c2):
        y = build_Y(c2c2.word('abab'))
        assert trace_word(y, 0, c2c2.word('abab')) == 0
        assert trace_word(y, 0, c2c2.word('ab')) == 2
        assert trace_word(y, 0, c2c2.word('b')) is None

    def test_union_and_json(self, c2c2, c2c3):
        y = build_Y(c2c2.word('ab'))
        both = disjoint_union([y, y])
        assert both.basepoints == (0, y.num_vertices)
        assert len(both.components) == 2
        data = both.to_json()
        assert data['group'] == 'C2*C2'
        assert {v['fiber'] for v in data['vertices']} == {'o', 'v0', 'v1'}
        with pytest.raises(PresentationMismatchException):
            disjoint_union([y, build_Y(c2c3.word('ab'))])
