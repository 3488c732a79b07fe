import pytest

from freeprod.core.cache import resolution_cache
from freeprod.core.exceptions import BudgetExceededException, InvalidInputException
from freeprod.models.group import Presentation
from freeprod.models.subcover import build_Y
from freeprod.services.bruteforce import partition_quotient_count
from freeprod.services.resolution import (
    CONFLICT, enumerate_quotients, fold_closure, resolution, word_source, zero_quotients,
)


class TestResolution:
    def test_c2c4_counts(self, c2c4):
        quotients = resolution(c2c4.word('a*b*a*b^-1'))
        assert len(quotients) == 5
        assert len(zero_quotients(quotients)) == 2

    def test_identity_quotient_present(self, c2c3):
        quotients = resolution(c2c3.word('a*b*a*b^-1'))
        assert sum(1 for q in quotients if q.is_identity) == 1

    def test_codomains_are_valid_and_surjective(self, c2c3):
        for q in resolution(c2c3.word('a*b*a*b^-1')):
            assert q.codomain.is_valid
            assert set(q.partition) == set(range(max(q.partition) + 1))

    def test_signatures_unique(self, c2c2):
        quotients = resolution(c2c2.word('abab'))
        assert len({q.signature for q in quotients}) == len(quotients)

    @pytest.mark.parametrize('group,word', [
        ('C2*C2', 'ab'), ('C2*C3', 'a*b*a*b^-1'), ('F2', 'a*b*a^-1*b^-1'), ('C2*F1', 'a*b^2'),
    ])
    def test_matches_partition_oracle(self, group, word):
        gamma = Presentation.parse(group).word(word)
        source = word_source([gamma])
        assert len(enumerate_quotients(source)) == partition_quotient_count(source)

    def test_two_copies(self, c2c2):
        source = word_source([c2c2.word('ab')], copies=2)
        assert len(source.basepoints) == 2
        assert len(source.components) == 2
        quotients = enumerate_quotients(source)
        # a copy glued onto the other, and both kept apart
        assert any(len(q.codomain.components) == 1 for q in quotients)
        assert any(len(q.codomain.components) == 2 for q in quotients)

    def test_word_source_needs_words(self):
        with pytest.raises(InvalidInputException):
            word_source([])


class TestFoldClosure:
    def test_folding_halves_the_circle(self, c2c2):
        y = build_Y(c2c2.word('abab'))
        partition = fold_closure(y, [(0, 2)])
        assert partition is not CONFLICT
        assert len(set(partition)) == 6

    def test_cross_fiber_conflict(self, c2c3):
        y = build_Y(c2c3.word('a*b*a*b^-1'))
        result = fold_closure(y, [(0, 4)])
        assert result is CONFLICT
        assert not result

    def test_seed_outside(self, c2c2):
        with pytest.raises(InvalidInputException):
            fold_closure(build_Y(c2c2.word('ab')), [(0, 50)])


class TestBudget:
    def test_budget_exceeded(self, c2c3):
        source = word_source([c2c3.word('a*b*a*b^-1')])
        with pytest.raises(BudgetExceededException) as exc:
            enumerate_quotients(source, budget=1, use_cache=False)
        assert exc.value.exit_code == 2

    def test_cache_reuses_results(self, c2c2):
        resolution_cache.clear()
        source = word_source([c2c2.word('abab')])
        first = enumerate_quotients(source)
        hits = resolution_cache.hits
        second = enumerate_quotients(source)
        assert resolution_cache.hits == hits + 1
        assert [q.signature for q in first] == [q.signature for q in second]
