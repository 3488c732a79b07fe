"""
Report builders shared by the command line and the JSON API.
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence

from freeprod.config import get_config
from freeprod.core.decorators import timed
from freeprod.core.exceptions import InvalidInputException
from freeprod.dto import (
    AnalyzeReportDTO, BruteReportDTO, ExactReportDTO, ExactRowDTO, ResolutionReportDTO,
    SampleReportDTO, SubgroupDTO, TorsionReportDTO,
)
from freeprod.models.group import Word, classify
from freeprod.services import bruteforce, exact, limits, montecarlo
from freeprod.services.resolution import enumerate_quotients, word_source
from freeprod.utils import rational_payload, rational_str

logger = logging.getLogger(__name__)

TORSION_REFERENCE_N = 1024
MARKDOWN_HEADER = "| group | word | limit | H_gamma |\n|---|---|---|---|"


def _precision(precision: Optional[int]) -> int:
    return precision if precision is not None else get_config().DECIMAL_PRECISION


@timed
def analyze_report(gamma: Word, budget: Optional[int] = None, precision: Optional[int] = None,
                   moments: int = 3):
    """H_gamma, its conjugacy classes and the Poisson limit law, or the torsion growth rate."""
    prec = _precision(precision)
    p = gamma.presentation
    cls = classify(gamma)
    if cls.is_trivial:
        raise InvalidInputException("The trivial word fixes every point; there is nothing to analyze")
    if cls.is_torsion:
        q = p.factors[cls.factor].size
        n = TORSION_REFERENCE_N
        value = exact.torsion_fix_expectation(q, cls.exponent, n)
        reference = {'N': n, 'exact': rational_payload(value, prec),
                     'leading': float(n) ** (1.0 / cls.order)}
        return TorsionReportDTO(gamma.to_text(), str(p), 'torsion', cls.order,
                                rational_payload(Fraction(1, cls.order), prec), reference)

    classes = limits.conjugacy_classes(limits.h_gamma(gamma, budget))
    mix = limits.mixture_of(classes)
    subgroups = [SubgroupDTO(h.kind, [g.to_text() for g in h.generators], c.alpha, c.beta)
                 for c in classes for h in c.members]
    return AnalyzeReportDTO(
        word=gamma.to_text(),
        group=str(p),
        kind='infinite',
        H_gamma=subgroups,
        mixture=[[alpha, beta] for alpha, beta in mix.terms],
        mean=rational_payload(mix.mean, prec),
        moments={str(r): rational_payload(limits.mixture_moment(mix, r), prec)
                 for r in range(1, moments + 1)},
        classes=[{'representative': c.representative.describe(), 'alpha': c.alpha, 'beta': c.beta}
                 for c in classes],
    )


def markdown_table(reports: Sequence) -> str:
    return MARKDOWN_HEADER + '\n' + '\n'.join(r.to_markdown_row() for r in reports) + '\n'


@timed
def exact_report(gamma: Word, grid: Sequence[int], max_cycle_len: Optional[int] = None,
                 second_moment: bool = True, budget: Optional[int] = None,
                 precision: Optional[int] = None) -> ExactReportDTO:
    prec = _precision(precision)
    max_len = max_cycle_len if max_cycle_len is not None else get_config().MAX_CYCLE_LEN
    p = gamma.presentation
    cls = classify(gamma)
    limit = None
    if cls.is_infinite:
        limit = Fraction(len(limits.h_gamma(gamma, budget)))
    exponent = 1.0 / p.m

    rows: List[ExactRowDTO] = []
    for n in grid:
        value = exact.fix_expectation(gamma, n, budget)
        row = ExactRowDTO(N=n, fix=rational_payload(value, prec))
        if second_moment:
            row.fix2 = rational_payload(exact.fix_moment(gamma, 2, n, budget), prec)
        row.cycles = {str(k): rational_payload(exact.cyc_expectation(gamma, k, n, budget), prec)
                      for k in range(2, max_len + 1)}
        if limit is not None and n > 0:
            row.scaled_error = exact.scaled_error(value, limit, n, exponent)
        rows.append(row)

    slope = None
    if limit is not None and len([n for n in grid if n > 0]) >= 2:
        try:
            slope = exact.correction_exponent(gamma, grid, limit, budget)
        except InvalidInputException:
            logger.info("No decay slope for %s: the error vanishes on the grid", gamma)
    return ExactReportDTO(gamma.to_text(), str(p), rows,
                          rational_payload(limit, prec) if limit is not None else None,
                          f"1/{p.m}", slope)


@timed
def sample_report(gamma: Word, n: int, trials: int, seed: int, max_cycle_len: Optional[int] = None,
                  threads: Optional[int] = None, with_exact: bool = False,
                  budget: Optional[int] = None, precision: Optional[int] = None) -> SampleReportDTO:
    est = montecarlo.estimate(gamma, n, trials, seed, max_cycle_len, threads)

    def stats_dict(s: montecarlo.EmpiricalStats):
        return {'trials': s.trials, 'mean': s.mean, 'variance': s.variance, 'stderr': s.stderr,
                'pmf': {str(k): v for k, v in s.pmf.items()}}

    exact_mean = None
    if with_exact:
        exact_mean = rational_payload(exact.fix_expectation(gamma, n, budget), _precision(precision))
    return SampleReportDTO(gamma.to_text(), str(gamma.presentation), n, trials, seed,
                           stats_dict(est.fix), {str(k): stats_dict(s) for k, s in est.cycles.items()},
                           exact_mean)


@timed
def brute_report(gamma: Word, n: int, other: Optional[Word] = None, max_cycle_len: Optional[int] = None,
                 cap: Optional[int] = None, precision: Optional[int] = None) -> BruteReportDTO:
    prec = _precision(precision)
    stats = bruteforce.exact_stats(gamma, n, other, max_cycle_len, cap=cap)
    joint = None
    if stats.joint is not None:
        joint = {'other': stats.joint.other,
                 'other_mean': rational_payload(stats.joint.other_mean, prec),
                 'joint_mean': rational_payload(stats.joint.joint_mean, prec),
                 'covariance': rational_payload(stats.joint.covariance, prec)}
    return BruteReportDTO(
        word=stats.word,
        group=str(gamma.presentation),
        N=n,
        total_homs=stats.total_homs,
        fix_distribution={str(k): v for k, v in stats.fix_distribution.items()},
        moments={str(r): rational_payload(v, prec) for r, v in stats.moments.items()},
        cycle_distributions={str(k): {str(v): c for v, c in d.items()}
                             for k, d in stats.cycle_distributions.items()},
        cycle_means={str(k): rational_payload(v, prec) for k, v in stats.cycle_means.items()},
        identity_probability=rational_payload(stats.identity_probability, prec),
        joint=joint,
    )


@timed
def resolution_report(words: Sequence[Word], copies: int = 1,
                      budget: Optional[int] = None) -> ResolutionReportDTO:
    """Every quotient class of the lift cover with its Euler characteristic."""
    quotients = enumerate_quotients(word_source(words, copies), budget)
    entries = [{'chi': rational_str(q.chi),
                'vertices': q.codomain.num_vertices,
                'identity': q.is_identity,
                'codomain': q.codomain.to_json()}
               for q in quotients]
    entries.sort(key=lambda e: (-Fraction(e['chi']), e['vertices']))
    return ResolutionReportDTO(', '.join(w.to_text() for w in words), str(words[0].presentation),
                               len(entries), sum(1 for q in quotients if q.chi == 0), entries)
