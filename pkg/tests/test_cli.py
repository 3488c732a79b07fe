import json

import pytest

from freeprod import cli
from freeprod.core.cache import resolution_cache
from freeprod.dto import CheckDTO, VerifyReportDTO


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestAnalyze:
    def test_json(self, capsys):
        code, out, _ = run(capsys, 'analyze', '-g', 'C2*C2', '-w', 'abab')
        assert code == 0
        report = json.loads(out)
        assert report['kind'] == 'infinite'
        assert report['mean']['exact'] == '5'
        assert len(report['H_gamma']) == 5

    def test_markdown(self, capsys):
        code, out, _ = run(capsys, 'analyze', '-g', 'C2*C2', '-w', 'abab', '-w', '(ab)^3',
                           '--format', 'markdown')
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith('| group | word |')
        assert lines[2].startswith('| C2*C2 | a*b*a*b | 5 |')
        assert lines[3].startswith('| C2*C2 | a*b*a*b*a*b | 6 |')

    def test_torsion(self, capsys):
        code, out, _ = run(capsys, 'analyze', '-g', 'C4', '-w', 'a^2')
        assert code == 0
        report = json.loads(out)
        assert report['kind'] == 'torsion'
        assert report['order'] == 2
        assert report['leading_exponent']['exact'] == '1/2'

    def test_named_generators(self, capsys):
        code, out, _ = run(capsys, 'analyze', '-g', 'F2[x,y]', '-w', 'x*y*x^-1*y^-1')
        assert code == 0
        assert json.loads(out)['mean']['exact'] == '1'
        code, out, _ = run(capsys, 'analyze', '-g', 'F2', '--gens', 'x,y', '-w', 'x*y*x^-1*y^-1')
        assert code == 0
        assert json.loads(out)['mean']['exact'] == '1'

    def test_trivial_word(self, capsys):
        code, _, err = run(capsys, 'analyze', '-g', 'C2*C2', '-w', 'abba')
        assert code == 3
        assert 'error:' in err


class TestExact:
    def test_csv(self, capsys):
        code, out, _ = run(capsys, 'exact', '-g', 'F2', '-w', 'a*b*a^-1*b^-1',
                           '--n-grid', '2,3,4', '--format', 'csv')
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith('N,fix,fix_decimal')
        assert lines[1].startswith('2,2,')
        assert lines[2].startswith('3,3/2,')
        assert lines[3].startswith('4,4/3,')

    def test_json_single_n(self, capsys):
        code, out, _ = run(capsys, 'exact', '-g', 'C4', '-w', 'a^2', '-N', '4')
        assert code == 0
        report = json.loads(out)
        assert report['rows'][0]['fix']['exact'] == '5/2'
        assert report['limit'] is None

    def test_needs_n(self, capsys):
        code, _, _ = run(capsys, 'exact', '-g', 'C4', '-w', 'a^2')
        assert code == 3


def test_brute(capsys):
    code, out, _ = run(capsys, 'brute', '-g', 'C2*C3', '-w', 'a*b', '-N', '3')
    assert code == 0
    report = json.loads(out)
    assert report['total_homs'] == 12
    assert report['joint'] is None


def test_brute_joint(capsys):
    code, out, _ = run(capsys, 'brute', '-g', 'F2', '-w', 'a', '-w', 'b', '-N', '3')
    assert code == 0
    assert json.loads(out)['joint']['covariance']['exact'] == '0'


def test_brute_cap(capsys):
    code, _, _ = run(capsys, 'brute', '-g', 'F2', '-w', 'a', '-N', '4', '--hom-cap', '10')
    assert code == 2


def test_sample_is_deterministic(capsys):
    argv = ('sample', '-g', 'C2*C3', '-w', 'a*b*a*b^-1', '-N', '10', '--trials', '500', '--seed', '9')
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    report = json.loads(first)
    assert report['trials'] == 500
    assert report['seed'] == 9


def test_resolve(capsys):
    code, out, _ = run(capsys, 'resolve', '-g', 'C2*C4', '-w', 'a*b*a*b^-1')
    assert code == 0
    report = json.loads(out)
    assert report['count'] == 5
    assert report['zero_count'] == 2


class TestErrors:
    def test_bad_group(self, capsys):
        code, _, err = run(capsys, 'analyze', '-g', 'D2*C3', '-w', 'ab')
        assert code == 3
        assert 'error:' in err

    def test_unknown_option(self, capsys):
        assert run(capsys, 'analyze', '--bogus')[0] == 3

    def test_no_command(self, capsys):
        assert run(capsys)[0] == 3

    def test_csv_not_for_analyze(self, capsys):
        assert run(capsys, 'analyze', '-g', 'C2*C2', '-w', 'ab', '--format', 'csv')[0] == 3

    def test_budget_exceeded(self, capsys):
        resolution_cache.clear()
        code, _, err = run(capsys, 'analyze', '-g', 'C2*C3', '-w', 'a*b*a*b^-1', '--budget', '1')
        assert code == 2
        assert 'budget' in err

    def test_budget_must_be_positive(self, capsys):
        assert run(capsys, 'analyze', '-g', 'C2*C2', '-w', 'ab', '--budget', '0')[0] == 3


class TestVerify:
    def test_failure_exit_code(self, capsys, monkeypatch):
        report = VerifyReportDTO(False, [CheckDTO('hom_count q=2', False, 'off by one')])
        monkeypatch.setattr(cli, 'run_suite', lambda quick=False, budget=None: report)
        code, out, _ = run(capsys, 'verify', '--format', 'markdown')
        assert code == 4
        assert 'FAIL hom_count q=2: off by one' in out

    def test_success(self, capsys, monkeypatch):
        report = VerifyReportDTO(True, [CheckDTO('hom_count q=2', True)])
        monkeypatch.setattr(cli, 'run_suite', lambda quick=False, budget=None: report)
        code, out, _ = run(capsys, 'verify')
        assert code == 0
        assert json.loads(out)['passed'] is True

    @pytest.mark.slow
    def test_quick_suite_passes(self, capsys):
        code, out, _ = run(capsys, 'verify', '--quick')
        assert code == 0
        assert json.loads(out)['passed'] is True
