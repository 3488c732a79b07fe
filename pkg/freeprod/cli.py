"""
Command-line front end.

    freeprod analyze -g C2*C2 -w abab
    freeprod exact -g F2 -w "a*b*a^-1*b^-1" --n-grid 2:64:2 --format csv
    freeprod sample -g C2*C3 -w "a*b*a*b^-1" -N 500 --trials 100000 --seed 7
    freeprod brute -g C2*C3 -w "a*b*a*b^-1" -N 5
    freeprod resolve -g C2*C4 -w "a*b*a*b^-1"
    freeprod verify --quick

Reports go to stdout, logs to stderr. Exit codes: 0 success, 2 budget
exceeded, 3 parse or input error, 4 verification failure.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from freeprod.config import get_config
from freeprod.core.exceptions import (
    FreeProdException, InvalidInputException, ParseException, VerificationFailure,
)
from freeprod.core.validators import parse_group, parse_words, validate_int, validate_report
from freeprod.services import reports
from freeprod.services.verify import run_suite
from freeprod.utils import parse_n_grid

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv', 'markdown')
LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


class _Parser(argparse.ArgumentParser):
    """Usage errors are parse errors (exit 3), not argparse's default 2."""

    def error(self, message):
        raise ParseException(f"{self.prog}: {message}")


def _words(args) -> list:
    if not args.group:
        raise ParseException("A group is required (-g/--group)")
    p = parse_group(args.group, args.gens)
    return parse_words(p, args.word or [])


def _require_n(args) -> int:
    if args.N is None:
        raise InvalidInputException("-N is required for this command")
    return validate_int(args.N, 'N', minimum=1)


def _emit(dicts: List[dict], kinds: List[str]) -> str:
    for d, kind in zip(dicts, kinds):
        for problem in validate_report(d, kind):
            logger.warning("report schema: %s", problem)
    payload = dicts[0] if len(dicts) == 1 else dicts
    return json.dumps(payload, indent=2)


def _only(args, *allowed):
    if args.format not in allowed:
        raise InvalidInputException(
            f"--format {args.format} is not available for {args.command} "
            f"(choose from {', '.join(allowed)})")


# ── commands ────────────────────────────────────────────────

def cmd_analyze(args) -> str:
    _only(args, 'json', 'markdown')
    found = [reports.analyze_report(w, args.budget, args.precision) for w in _words(args)]
    if args.format == 'markdown':
        return reports.markdown_table(found)
    return _emit([r.to_dict() for r in found], [r.kind if r.kind == 'torsion' else 'analyze'
                                                for r in found])


def cmd_exact(args) -> str:
    _only(args, 'json', 'csv')
    if args.n_grid:
        grid = parse_n_grid(args.n_grid)
    else:
        grid = [_require_n(args)]
    found = [reports.exact_report(w, grid, args.max_cycle_len, not args.no_second_moment,
                                  args.budget, args.precision)
             for w in _words(args)]
    if args.format == 'csv':
        if len(found) == 1:
            return found[0].to_csv()
        return '\n'.join(f"# {r.group} {r.word}\n{r.to_csv()}" for r in found)
    return _emit([r.to_dict() for r in found], ['exact'] * len(found))


def cmd_sample(args) -> str:
    _only(args, 'json')
    n = _require_n(args)
    trials = validate_int(args.trials, 'trials', minimum=0)
    found = [reports.sample_report(w, n, trials, args.seed, args.max_cycle_len, args.threads,
                                   args.with_exact, args.budget, args.precision)
             for w in _words(args)]
    return _emit([r.to_dict() for r in found], ['sample'] * len(found))


def cmd_brute(args) -> str:
    _only(args, 'json')
    n = _require_n(args)
    words = _words(args)
    if len(words) > 2:
        raise InvalidInputException("brute takes one word, or two for joint statistics")
    other = words[1] if len(words) == 2 else None
    report = reports.brute_report(words[0], n, other, args.max_cycle_len, args.hom_cap,
                                  args.precision)
    return _emit([report.to_dict()], ['brute'])


def cmd_resolve(args) -> str:
    _only(args, 'json')
    copies = validate_int(args.copies, 'copies', minimum=1)
    report = reports.resolution_report(_words(args), copies, args.budget)
    return _emit([report.to_dict()], ['resolve'])


def _verify_summary(report) -> str:
    lines = [f"{'ok  ' if c.passed else 'FAIL'} {c.name}" + ('' if c.passed else f": {c.detail}")
             for c in report.checks]
    failed = len(report.failures)
    lines.append(f"{len(report.checks)} checks, {failed} failed")
    return '\n'.join(lines)


def cmd_verify(args) -> str:
    _only(args, 'json', 'markdown')
    report = run_suite(quick=args.quick, budget=args.budget)
    text = _emit([report.to_dict()], ['verify']) if args.format == 'json' else _verify_summary(report)
    if not report.passed:
        _write(text)
        raise VerificationFailure(f"{len(report.failures)} invariant checks failed",
                                  [c.name for c in report.failures])
    return text


# ── parser ──────────────────────────────────────────────────

def _common() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('-g', '--group', help="free product, e.g. C2*C3, F2, C2[x]*F1[y]")
    common.add_argument('--gens', help="comma-separated generator names overriding the defaults")
    common.add_argument('-w', '--word', action='append', help="word in the group (repeatable)")
    common.add_argument('--budget', type=int, default=None,
                        help="merge-tree node budget (default: FREEPROD_BUDGET or 10^7)")
    common.add_argument('--precision', type=int, default=None,
                        help="significant digits of decimal approximations")
    common.add_argument('--format', choices=FORMATS, default='json')
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help="-v for INFO, -vv for DEBUG logging on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='freeprod',
                     description="Local statistics of word-random permutations over free products.",
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)
    common = _common()

    p = sub.add_parser('analyze', parents=[common],
                       help="H_gamma, conjugacy classes and the Poisson limit law")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser('exact', parents=[common], help="exact E[fix], E[fix^2], E[cyc_L] over an N-grid")
    p.add_argument('-N', type=int)
    p.add_argument('--n-grid', help="a:b:mult (geometric), a:b, or a,b,c")
    p.add_argument('-L', '--max-cycle-len', type=int, default=None)
    p.add_argument('--no-second-moment', action='store_true')
    p.set_defaults(handler=cmd_exact)

    p = sub.add_parser('sample', parents=[common], help="Monte Carlo estimate of fix and cycle counts")
    p.add_argument('-N', type=int)
    p.add_argument('--trials', type=int, default=10_000)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--threads', type=int, default=None)
    p.add_argument('-L', '--max-cycle-len', type=int, default=None)
    p.add_argument('--with-exact', action='store_true', help="also report the exact mean")
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser('brute', parents=[common],
                       help="exhaustive distribution over Hom(Gamma, Sym(N)); a second -w adds joint statistics")
    p.add_argument('-N', type=int)
    p.add_argument('-L', '--max-cycle-len', type=int, default=None)
    p.add_argument('--hom-cap', type=int, default=None,
                   help="refuse to enumerate more homomorphisms than this")
    p.set_defaults(handler=cmd_brute)

    p = sub.add_parser('resolve', parents=[common], help="dump the resolution of the lift cover")
    p.add_argument('--copies', type=int, default=1, help="disjoint copies of each word's circle")
    p.set_defaults(handler=cmd_resolve)

    p = sub.add_parser('verify', parents=[common], help="run the cross-module invariant suite")
    p.add_argument('--quick', action='store_true', help="moments up to 2 and fewer power checks")
    p.set_defaults(handler=cmd_verify)

    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger('freeprod').setLevel(level)


def _write(text: str):
    sys.stdout.write(text if text.endswith('\n') else text + '\n')


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ParseException as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    if not getattr(args, 'handler', None):
        parser.print_help(sys.stderr)
        return 3

    _configure_logging(args.verbose)
    logger.debug("freeprod %s with budget %s", args.command, args.budget or get_config().MERGE_BUDGET)
    try:
        if args.budget is not None:
            validate_int(args.budget, 'budget', minimum=1)
        _write(args.handler(args))
    except FreeProdException as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())
