"""
Validators for CLI arguments and API request payloads.
Provides reusable validation functions for common scenarios.
"""

from typing import Any, Dict, List, Optional, Sequence

from freeprod.core.exceptions import InvalidInputException, ParseException


def validate_required_fields(data: Dict, required_fields: list) -> Optional[Dict]:
    """
    Validate that all required fields are present.
    Returns dict of missing fields or None if all present.
    """
    missing = [f for f in required_fields if f not in data or data[f] is None or data[f] == '']
    if missing:
        return {'missing_fields': missing}
    return None


def validate_int(value: Any, name: str, minimum: int = 0, maximum: Optional[int] = None) -> int:
    if isinstance(value, bool):
        raise InvalidInputException(f"{name} must be an integer")
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise InvalidInputException(f"{name} must be an integer, got {value!r}")
    if number != value and not isinstance(value, str):
        raise InvalidInputException(f"{name} must be an integer, got {value!r}")
    if number < minimum:
        raise InvalidInputException(f"{name} must be >= {minimum}, got {number}")
    if maximum is not None and number > maximum:
        raise InvalidInputException(f"{name} must be <= {maximum}, got {number}")
    return number


def parse_generator_names(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    names = [n.strip() for n in text.split(',')]
    if not all(names):
        raise ParseException(f"Empty generator name in {text!r}")
    return names


def parse_group(text: str, gens: Optional[str] = None):
    from freeprod.models.group import Presentation

    if not isinstance(text, str):
        raise ParseException("Group must be a string such as 'C2*C3'")
    return Presentation.parse(text, parse_generator_names(gens))


def parse_words(p, texts: Sequence[str]):
    from freeprod.models.group import parse_word

    if not texts:
        raise InvalidInputException("At least one word is required")
    for t in texts:
        if not isinstance(t, str):
            raise ParseException(f"Word must be a string, got {t!r}")
    return [parse_word(t, p) for t in texts]


# ── report schemas ──────────────────────────────────────────

RATIONAL = {'exact': str, 'decimal': str}

REPORT_SCHEMAS: Dict[str, Dict[str, Any]] = {
    'analyze': {'word': str, 'group': str, 'kind': str, 'H_gamma': list, 'mixture': list,
                'mean': RATIONAL, 'moments': dict},
    'torsion': {'word': str, 'group': str, 'kind': str, 'order': int,
                'leading_exponent': RATIONAL, 'reference': dict},
    'exact': {'word': str, 'group': str, 'rows': list},
    'sample': {'word': str, 'group': str, 'N': int, 'trials': int, 'seed': int, 'fix': dict,
               'cycles': dict},
    'brute': {'word': str, 'group': str, 'N': int, 'total_homs': int, 'fix_distribution': dict,
              'moments': dict, 'cycle_distributions': dict, 'cycle_means': dict},
    'resolve': {'word': str, 'group': str, 'quotients': list, 'count': int, 'zero_count': int},
    'verify': {'passed': bool, 'checks': list},
}


def _schema_problems(value: Any, schema: Any, path: str) -> List[str]:
    if isinstance(schema, dict):
        if not isinstance(value, dict):
            return [f"{path} should be an object"]
        problems = []
        for key, sub in schema.items():
            if key not in value:
                problems.append(f"{path}.{key} is missing")
            else:
                problems.extend(_schema_problems(value[key], sub, f"{path}.{key}"))
        return problems
    if schema is int and isinstance(value, bool):
        return [f"{path} should be int"]
    if not isinstance(value, schema):
        return [f"{path} should be {schema.__name__}"]
    return []


def validate_report(report: Dict, kind: str) -> List[str]:
    """Return schema violations of a JSON report (empty when it conforms)."""
    if kind not in REPORT_SCHEMAS:
        raise InvalidInputException(f"Unknown report kind {kind!r}")
    return _schema_problems(report, REPORT_SCHEMAS[kind], kind)


class RequestValidator:
    """Parse and validate API request bodies."""

    @staticmethod
    def validate_payload(data: Optional[Dict], required: Sequence[str] = ('group', 'word')) -> Dict:
        if not isinstance(data, dict):
            raise InvalidInputException("Request body must be a JSON object")
        missing = validate_required_fields(data, list(required))
        if missing:
            raise InvalidInputException(f"Missing fields: {', '.join(missing['missing_fields'])}")
        p = parse_group(data['group'], data.get('gens'))
        words = data['word'] if isinstance(data['word'], list) else [data['word']]
        parsed = {'presentation': p, 'words': parse_words(p, words)}
        for key, minimum in (('N', 0), ('trials', 0), ('seed', 0), ('max_cycle_len', 1),
                             ('precision', 1), ('budget', 1)):
            if data.get(key) is not None:
                parsed[key] = validate_int(data[key], key, minimum)
        if data.get('n_grid') is not None:
            from freeprod.utils import parse_n_grid
            parsed['n_grid'] = parse_n_grid(str(data['n_grid']))
        return parsed
