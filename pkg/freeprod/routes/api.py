"""
JSON API over the report builders.

Every POST body is ``{"group": ..., "word": ..., "N": ..., ...}``; responses are
``{"success": true, "data": <report>}`` or ``{"success": false, "error": ...}``.
"""

from flask import Blueprint, current_app, request

from freeprod import __version__
from freeprod.core.decorators import api_response
from freeprod.core.exceptions import InvalidInputException
from freeprod.core.validators import RequestValidator
from freeprod.services import reports

bp = Blueprint('api', __name__)


def _payload(required=('group', 'word')):
    return RequestValidator.validate_payload(request.get_json(silent=True), required)


def _budget(data):
    return data.get('budget', current_app.config['MERGE_BUDGET'])


@bp.route('/health')
@api_response
def health():
    return {'status': 'ok', 'version': __version__}


@bp.route('/analyze', methods=['POST'])
@api_response
def analyze():
    data = _payload()
    return [reports.analyze_report(w, _budget(data), data.get('precision')).to_dict()
            for w in data['words']]


@bp.route('/exact', methods=['POST'])
@api_response
def exact():
    data = _payload()
    if 'n_grid' in data:
        grid = data['n_grid']
    elif 'N' in data:
        grid = [data['N']]
    else:
        raise InvalidInputException("Either N or n_grid is required")
    gamma = data['words'][0]
    return reports.exact_report(gamma, grid, data.get('max_cycle_len'), True, _budget(data),
                                data.get('precision')).to_dict()


@bp.route('/brute', methods=['POST'])
@api_response
def brute():
    data = _payload(('group', 'word', 'N'))
    words = data['words']
    if len(words) > 2:
        raise InvalidInputException("brute takes one word, or two for joint statistics")
    other = words[1] if len(words) == 2 else None
    return reports.brute_report(words[0], data['N'], other, data.get('max_cycle_len'),
                                current_app.config['HOM_CAP'], data.get('precision')).to_dict()


@bp.route('/sample', methods=['POST'])
@api_response
def sample():
    data = _payload(('group', 'word', 'N'))
    trials = data.get('trials', 10_000)
    return reports.sample_report(data['words'][0], data['N'], trials, data.get('seed', 0),
                                 data.get('max_cycle_len'), current_app.config['THREADS'],
                                 budget=_budget(data), precision=data.get('precision')).to_dict()
