"""Seeded random-word checks of the sub-cover, resolution and sampling invariants."""

import numpy as np
import pytest

from freeprod.models.group import Presentation, classify
from freeprod.models.hom import batch_cycle_counts, batch_fix_counts, evaluate_batch
from freeprod.models.subcover import (
    BASED, UNBASED, SubCover, automorphism_count, build_Y, canonical_form, chi_grp,
)
from freeprod.services import montecarlo
from freeprod.services.resolution import enumerate_quotients, word_source

SEEDS = range(8)


def random_word(group: str, seed: int, max_terms: int = 5):
    """A random word of infinite order over ``group``, or None if the draw is torsion."""
    p = Presentation.parse(group)
    rng = np.random.default_rng(seed)
    letters = 'ab'
    terms = []
    for _ in range(int(rng.integers(2, max_terms + 1))):
        gen = letters[int(rng.integers(len(letters)))]
        exponent = int(rng.integers(1, 3)) * (1 if rng.random() < 0.5 else -1)
        terms.append(f"{gen}^{exponent}")
    w = p.word('*'.join(terms))
    cls = classify(w)
    return cls.reduced if cls.is_infinite else None


def permuted(z: SubCover, rng: np.random.Generator) -> SubCover:
    new = rng.permutation(z.num_vertices).tolist()
    fibers = [0] * z.num_vertices
    for v, f in enumerate(z.fibers):
        fibers[new[v]] = f
    edges = [(lab, new[s], new[d]) for lab, s, d in z.edges]
    return SubCover.build(z.presentation, fibers, edges, [new[b] for b in z.basepoints])


def rebased(z: SubCover, base: int) -> SubCover:
    return SubCover.build(z.presentation, z.fibers, z.edges, (base,))


def _words(groups, max_terms=5):
    cases = []
    for group in groups:
        for seed in SEEDS:
            w = random_word(group, seed, max_terms)
            if w is not None:
                cases.append(pytest.param(w, id=f"{group}-{seed}"))
    return cases


WORDS = _words(['C2*C3', 'C3*C4', 'C2*C4', 'F2', 'C2*F1'])
SHORT_WORDS = _words(['C2*C3', 'C2*C4', 'F2'], max_terms=4)


class TestRandomCircles:
    @pytest.mark.parametrize('w', WORDS)
    def test_circle_is_valid(self, w):
        y = build_Y(w)
        assert y.problems() == []
        assert y.is_valid
        assert len(y.components) == 1

    @pytest.mark.parametrize('w', WORDS)
    def test_relabeling_preserves_invariants(self, w):
        y = build_Y(w)
        rng = np.random.default_rng(len(y.edges))
        for _ in range(3):
            moved = permuted(y, rng)
            assert canonical_form(moved, BASED) == canonical_form(y, BASED)
            assert canonical_form(moved, UNBASED) == canonical_form(y, UNBASED)
            assert chi_grp(moved).total == chi_grp(y).total
            assert moved.num_vertices == y.num_vertices
            assert len(moved.edges) == len(y.edges)
            assert automorphism_count(moved) == automorphism_count(y)

    @pytest.mark.parametrize('w', WORDS)
    def test_automorphisms_match_basepoint_orbit(self, w):
        # automorphisms act freely, so they are counted by the basepoints with the same based form
        y = build_Y(w)
        reference = canonical_form(y, BASED)
        orbit = sum(1 for v in range(y.num_vertices)
                    if canonical_form(rebased(y, v), BASED) == reference)
        assert automorphism_count(y) == orbit
        assert orbit == classify(w).power


class TestRandomQuotients:
    @pytest.mark.parametrize('w', SHORT_WORDS)
    def test_quotients_valid_and_lower_chi(self, w):
        source = word_source([w])
        top = chi_grp(source).total
        quotients = enumerate_quotients(source, use_cache=False)
        assert quotients
        for q in quotients:
            assert q.codomain.problems() == []
            assert q.chi <= top
        assert len({q.signature for q in quotients}) == len(quotients)


class TestRandomSamples:
    @pytest.mark.parametrize('w', WORDS[::3])
    def test_counts_within_range(self, w):
        n = 9
        rng = np.random.default_rng(17)
        perms = evaluate_batch(montecarlo.sample_images(w.presentation, n, 200, rng), w)
        fix = batch_fix_counts(perms)
        assert ((fix >= 0) & (fix <= n)).all()
        cycles = batch_cycle_counts(perms, n)
        assert (cycles @ np.arange(1, n + 1) == n).all()

    @pytest.mark.parametrize('w', WORDS[::4])
    def test_estimate_support(self, w):
        n = 7
        est = montecarlo.estimate(w, n, 500, seed=3, max_cycle_len=3)
        assert all(0 <= k <= n for k in est.fix.pmf)
        assert 0 <= est.fix.mean <= n
        for length, stats in est.cycles.items():
            assert all(0 <= k <= n // length for k in stats.pmf)
