"""Small exact-arithmetic and formatting helpers shared across services."""

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple, Union

import sympy

from freeprod.core.exceptions import ParseException

Rational = Union[int, Fraction]


def falling(n: int, k: int) -> int:
    """Falling factorial (n)_k = n(n-1)...(n-k+1); zero when 0 <= n < k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return 1
    if n < 0:
        return math.prod(range(n, n - k, -1))
    return math.perm(n, k)


@lru_cache(maxsize=None)
def divisors(n: int) -> Tuple[int, ...]:
    return tuple(int(d) for d in sympy.divisors(n))


@lru_cache(maxsize=None)
def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius is defined on positive integers")
    exponents = sympy.factorint(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    return int(sympy.functions.combinatorial.numbers.stirling(n, k))


def lcm_all(values) -> int:
    result = 1
    for v in values:
        result = math.lcm(result, v)
    return result


# ── formatting ──────────────────────────────────────────

def rational_str(value: Rational) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def decimal_str(value: Rational, precision: int = 12) -> str:
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = precision
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def rational_payload(value: Rational, precision: int = 12) -> Dict[str, str]:
    return {'exact': rational_str(value), 'decimal': decimal_str(value, precision)}


def parse_n_grid(text: str) -> List[int]:
    """Parse an N-grid 'a:b:mult' (geometric) or 'a:b' (step 1) or 'a,b,c'."""
    text = text.strip()
    try:
        if ',' in text:
            grid = [int(t) for t in text.split(',') if t.strip()]
        else:
            parts = [int(t) for t in text.split(':')]
            if len(parts) == 2:
                grid = list(range(parts[0], parts[1] + 1))
            elif len(parts) == 3:
                start, stop, mult = parts
                if mult < 2 or start < 1:
                    raise ParseException(f"Geometric grid needs start >= 1 and mult >= 2: {text!r}")
                grid = []
                n = start
                while n <= stop:
                    grid.append(n)
                    n *= mult
            else:
                raise ParseException(f"Malformed N-grid: {text!r}")
    except ValueError as e:
        raise ParseException(f"Malformed N-grid: {text!r}") from e
    if not grid or any(n < 0 for n in grid):
        raise ParseException(f"N-grid must list non-negative integers: {text!r}")
    return grid
