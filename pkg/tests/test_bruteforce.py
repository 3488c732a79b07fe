from fractions import Fraction

import pytest

from freeprod.core.exceptions import BudgetExceededException, InvalidInputException
from freeprod.models.group import Presentation
from freeprod.models.subcover import O_FIBER, SubCover
from freeprod.services import bruteforce, exact


def test_order_divider_perms_are_distinct():
    perms = bruteforce.order_divider_perms(3, 4)
    assert len(perms) == len(set(perms)) == exact.hom_count(3, 4)


def test_hom_total():
    assert bruteforce.hom_total(Presentation.parse('C2*F1'), 3) == 24
    assert bruteforce.hom_total(Presentation.parse('C2*C3'), 3) == 12


def test_enumerate_homs(c2c2):
    homs = list(bruteforce.enumerate_homs(c2c2, 3))
    assert len(homs) == 16
    assert all(h.is_valid() for h in homs)


class TestExactStats:
    def test_totals(self, c2c3):
        stats = bruteforce.exact_stats(c2c3.word('a*b'), 3)
        assert stats.total_homs == 12
        assert sum(stats.fix_distribution.values()) == 12

    def test_free_generator(self, f2):
        stats = bruteforce.exact_stats(f2.word('a'), 3, moments=2)
        assert stats.fix_distribution == {0: 12, 1: 18, 3: 6}
        assert stats.mean == 1
        assert stats.moments[2] == 2
        assert stats.identity_probability == Fraction(1, 6)

    def test_cycle_distribution(self, f2):
        stats = bruteforce.exact_stats(f2.word('a'), 3, max_cycle_len=3)
        assert stats.cycle_distributions[3] == {0: 24, 1: 12}
        assert stats.cycle_means[2] == Fraction(1, 2)

    def test_one_point(self, c2c2):
        stats = bruteforce.exact_stats(c2c2.word('abab'), 1)
        assert stats.total_homs == 1
        assert stats.mean == 1

    def test_correlated_powers(self, c2c2):
        stats = bruteforce.exact_stats(c2c2.word('ab'), 5, other=c2c2.word('(ab)^3'), moments=1)
        assert stats.joint.other == c2c2.word('(ab)^3').to_text()
        assert stats.joint.covariance > 0

    def test_cap(self, c2c3):
        with pytest.raises(BudgetExceededException) as exc:
            bruteforce.exact_stats(c2c3.word('a*b'), 3, cap=5)
        assert exc.value.exit_code == 2

    def test_rejects_bad_input(self, c2c2, c2c3):
        with pytest.raises(InvalidInputException):
            bruteforce.exact_stats(c2c2.word('ab'), 0)
        with pytest.raises(InvalidInputException):
            bruteforce.exact_stats(c2c2.word('ab'), 2, other=c2c3.word('ab'))


def test_partition_quotient_count(c2c2):
    assert bruteforce.partition_quotient_count(SubCover.build(c2c2, [O_FIBER], [])) == 1
    assert bruteforce.partition_quotient_count(SubCover.build(c2c2, [O_FIBER, O_FIBER], [])) == 2
