import math
from fractions import Fraction

import pytest

from freeprod.core.exceptions import InvalidInputException
from freeprod.models.group import Presentation
from freeprod.models.subcover import O_FIBER, SubCover
from freeprod.services import bruteforce, exact


class TestHomCounts:
    def test_involutions(self):
        assert [exact.hom_count(2, n) for n in range(7)] == [1, 1, 2, 4, 10, 26, 76]

    def test_order_three(self):
        assert [exact.hom_count(3, n) for n in range(7)] == [1, 1, 1, 3, 9, 21, 81]

    def test_order_four(self):
        assert exact.hom_count(4, 4) == 16

    def test_prime_order_trivial_at_one(self):
        assert exact.hom_count(5, 1) == 1

    @pytest.mark.parametrize('q', [2, 3, 4, 6])
    def test_matches_enumeration(self, q):
        for n in range(6):
            assert exact.hom_count(q, n) == len(bruteforce.order_divider_perms(q, n))

    def test_rejects_bad_input(self):
        with pytest.raises(InvalidInputException):
            exact.HomCountTable(0)
        with pytest.raises(InvalidInputException):
            exact.hom_count(2, -1)


class TestExtensions:
    @pytest.mark.parametrize('q,n,profile,expected', [
        (2, 2, exact.CyclicProfile.of([1], []), 1),
        (3, 4, exact.CyclicProfile.of([1], []), 2),
        (4, 4, exact.CyclicProfile.of([], [4]), 1),
        (2, 3, exact.CyclicProfile.of([0], []), 4),
    ])
    def test_anchor_counts(self, q, n, profile, expected):
        assert exact.count_extensions(q, n, profile) == expected

    def test_invalid_profiles(self):
        with pytest.raises(InvalidInputException):
            exact.count_extensions(3, 5, exact.CyclicProfile.of([], [2]))
        with pytest.raises(InvalidInputException):
            exact.count_extensions(3, 5, exact.CyclicProfile.of([3], []))
        with pytest.raises(InvalidInputException):
            exact.count_extensions(2, 1, exact.CyclicProfile.of([1], []))


class TestEmbeddings:
    def test_fixed_point_of_involution(self):
        p = Presentation.parse('C2')
        loop = SubCover.build(p, [0], [((0, 0), 0, 0)])
        assert exact.emb_expectation(loop, 2) == 1

    def test_single_point_counts_n(self, c2c3):
        point = SubCover.build(c2c3, [O_FIBER], [])
        assert exact.emb_expectation(point, 7) == 7

    def test_too_many_vertices(self, c2c3):
        points = SubCover.build(c2c3, [O_FIBER] * 3, [])
        assert exact.emb_expectation(points, 2) == 0


class TestFixedPoints:
    @pytest.mark.parametrize('n', range(2, 13))
    def test_free_commutator(self, f2, n):
        assert exact.fix_expectation(f2.word('a*b*a^-1*b^-1'), n) == Fraction(n, n - 1)

    @pytest.mark.slow
    def test_free_commutator_large(self, f2):
        gamma = f2.word('a*b*a^-1*b^-1')
        for n in range(13, 51):
            assert exact.fix_expectation(gamma, n) == Fraction(n, n - 1)

    def test_torsion_anchor(self):
        assert exact.torsion_fix_expectation(4, 2, 4) == Fraction(5, 2)
        p = Presentation.parse('C4')
        assert exact.fix_expectation(p.word('a^2'), 4) == Fraction(5, 2)

    def test_trivial_word(self, c2c2):
        assert exact.fix_expectation(c2c2.identity(), 9) == 9

    def test_conjugation_invariance(self, c2c3):
        gamma = c2c3.word('a*b*a*b^-1')
        conj = c2c3.word('b') * gamma * c2c3.word('b').inverse()
        for n in range(1, 6):
            assert exact.fix_expectation(conj, n) == exact.fix_expectation(gamma, n)

    def test_moment_zero(self, c2c3):
        assert exact.fix_moment(c2c3.word('ab'), 0, 5) == 1

    def test_torsion_exponent_range(self):
        with pytest.raises(InvalidInputException):
            exact.torsion_fix_expectation(4, 4, 10)

    @pytest.mark.slow
    def test_torsion_expansion(self):
        scaled = []
        for n in (16, 64, 256, 1024, 4096):
            value = float(exact.torsion_fix_expectation(4, 2, n))
            approx = math.sqrt(n) + n ** 0.25 - 0.5 - 0.75 * n ** -0.25
            scaled.append(abs(value - approx) * math.sqrt(n))
        assert max(scaled) < 10


ORACLE = [
    ('C2*C2', 'ab'), ('C2*C2', 'abab'), ('C2*C3', 'a*b*a*b^-1'), ('C2*C4', 'a*b^2'),
    ('C3*C3', 'a*b^-1'), ('F2', 'a*b*a^-1*b^-1'), ('F2', 'a^2*b'), ('C2*F1', 'a*b*a*b^-1'),
    ('C4', 'a^2'), ('C2*C2', 'a'),
]


class TestAgainstBruteForce:
    @pytest.mark.parametrize('group,word', ORACLE)
    def test_moments(self, group, word):
        gamma = Presentation.parse(group).word(word)
        for n in range(1, 5):
            stats = bruteforce.exact_stats(gamma, n, moments=2)
            assert exact.fix_expectation(gamma, n) == stats.mean
            assert exact.fix_moment(gamma, 2, n) == stats.moments[2]

    @pytest.mark.parametrize('group,word', ORACLE[:6])
    def test_cycles(self, group, word):
        gamma = Presentation.parse(group).word(word)
        for n in range(2, 5):
            stats = bruteforce.exact_stats(gamma, n, max_cycle_len=3, moments=1)
            for k in range(2, min(3, n) + 1):
                assert exact.cyc_expectation(gamma, k, n) == stats.cycle_means[k]

    @pytest.mark.parametrize('group,first,second', [
        ('C2*C2', 'ab', '(ab)^3'),
        ('C2*C3', 'ab', 'a*b*a*b^-1'),
        ('C2*C4', 'a*b^2', 'a*b*a*b^-1'),
        ('C3*C3', 'ab', 'a*b^-1'),
        ('C2*F1', 'ab', 'a*b*a*b^-1'),
    ])
    def test_joint(self, group, first, second):
        p = Presentation.parse(group)
        gamma, other = p.word(first), p.word(second)
        for n in range(1, 5):
            stats = bruteforce.exact_stats(gamma, n, other=other, moments=1)
            assert exact.joint_fix_expectation(gamma, other, n) == stats.joint.joint_mean

    def test_free_generators_independent(self, f2):
        a, b = f2.word('a'), f2.word('b')
        for n in range(1, 6):
            assert exact.joint_fix_expectation(a, b, n) == 1


class TestDecay:
    def test_scaled_error(self):
        assert exact.scaled_error(Fraction(3), Fraction(2), 16, 0.25) == pytest.approx(2.0)

    def test_free_commutator_slope(self, f2):
        slope = exact.correction_exponent(f2.word('a*b*a^-1*b^-1'), [10, 20, 40, 80], Fraction(1))
        assert slope == pytest.approx(-1.0, abs=0.1)

    def test_slope_needs_error(self, c2c2):
        with pytest.raises(InvalidInputException):
            exact.correction_exponent(c2c2.identity(), [3, 5], Fraction(3))

    @pytest.mark.slow
    def test_error_decay_bounded(self, c2c3):
        gamma = c2c3.word('a*b*a*b^-1')
        terms = [abs(exact.scaled_error(exact.fix_expectation(gamma, n), Fraction(2), n, 1 / 6))
                 for n in (20, 40, 80, 160, 320)]
        assert terms[-1] < 2 * sorted(terms)[2]

    def test_three_factor_correction_settles(self):
        # C3*C3*C3, abc: E[fix] = 1 + 1/N + c N^{-4/3} + ...
        gamma = Presentation.parse('C3*C3*C3').word('abc')
        scaled = [float(exact.fix_expectation(gamma, n) - 1 - Fraction(1, n)) * n ** (4 / 3)
                  for n in (30, 60, 120, 240)]
        assert all(-5 < s < 0 for s in scaled)
        steps = [abs(b - a) for a, b in zip(scaled, scaled[1:])]
        assert steps[-1] < steps[0]
