"""
Free products of finite cyclic and finitely generated free groups.

A Presentation lists the factors in order; a Word is an element of the free
product kept in normal form: a sequence of syllables, adjacent syllables in
distinct factors. A cyclic-factor syllable carries an exponent 1 <= t <= q-1,
a free-factor syllable carries a nonempty freely reduced tuple of signed
letters (+k is generator k-1 of that factor, -k its inverse).
"""

import math
import re
import string
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple, Union

from freeprod.core.exceptions import (
    InvalidInputException, ParseException, PresentationMismatchException,
)
from freeprod.utils import divisors, lcm_all

CYCLIC = 'cyclic'
FREE = 'free'

# longest reduced word, in letters, that powers may produce
MAX_WORD_LETTERS = 1_000_000

_NAME_RE = re.compile(r'[A-Za-z][A-Za-z0-9_]*$')
_FACTOR_RE = re.compile(r'^\s*([CF])\s*(\d+)\s*(?:\[([^\]]*)\])?\s*$')


def _default_names(count: int) -> List[str]:
    pool = list(string.ascii_lowercase)
    return [pool[i] if i < len(pool) else f"g{i}" for i in range(count)]


@dataclass(frozen=True)
class FactorSpec:
    """One free factor: Cyclic(q) with a single generator or Free(r)."""
    kind: str
    size: int
    names: Tuple[str, ...]

    @property
    def is_cyclic(self) -> bool:
        return self.kind == CYCLIC

    @property
    def order(self) -> Optional[int]:
        return self.size if self.is_cyclic else None

    @property
    def rank(self) -> int:
        return 1 if self.is_cyclic else self.size

    @property
    def symbol(self) -> str:
        return f"C{self.size}" if self.is_cyclic else f"F{self.size}"


@dataclass(frozen=True)
class Presentation:
    factors: Tuple[FactorSpec, ...]

    def __post_init__(self):
        if not self.factors:
            raise ParseException("A presentation needs at least one factor")
        seen = set()
        for f in self.factors:
            if f.kind == CYCLIC and f.size < 2:
                raise ParseException(f"Cyclic factor order must be >= 2, got C{f.size}")
            if f.kind == FREE and f.size < 1:
                raise ParseException(f"Free factor rank must be >= 1, got F{f.size}")
            if len(f.names) != f.rank:
                raise ParseException(f"{f.symbol} needs {f.rank} generator name(s), got {len(f.names)}")
            for name in f.names:
                if not _NAME_RE.match(name):
                    raise ParseException(f"Invalid generator name {name!r}")
                if name in seen:
                    raise ParseException(f"Duplicate generator name {name!r}")
                seen.add(name)

    # ── construction ────────────────────────────────────────

    @classmethod
    def parse(cls, text: str, names: Optional[List[str]] = None) -> 'Presentation':
        """Parse ``C2*C3``, ``C2*C2*F1``, optionally ``C2[x]*F2[y,z]``.

        ``names`` overrides every generator name in order.
        """
        if not text or not text.strip():
            raise ParseException("Empty group specification")
        raw = []
        for token in text.split('*'):
            m = _FACTOR_RE.match(token)
            if not m:
                raise ParseException(f"Malformed factor {token.strip()!r} in {text!r}")
            kind = CYCLIC if m.group(1) == 'C' else FREE
            size = int(m.group(2))
            explicit = [n.strip() for n in m.group(3).split(',')] if m.group(3) is not None else None
            raw.append((kind, size, explicit))

        total = sum(1 if kind == CYCLIC else size for kind, size, _ in raw)
        if names is not None and len(names) != total:
            raise ParseException(f"Expected {total} generator names, got {len(names)}")
        defaults = list(names) if names is not None else _default_names(total)

        factors = []
        cursor = 0
        for kind, size, explicit in raw:
            rank = 1 if kind == CYCLIC else size
            chosen = defaults[cursor:cursor + rank]
            if explicit is not None and names is None:
                chosen = explicit
            cursor += rank
            factors.append(FactorSpec(kind, size, tuple(chosen)))
        return cls(tuple(factors))

    # ── queries ─────────────────────────────────────────────

    @property
    def m(self) -> int:
        """lcm of the finite factor orders; 1 when torsion-free."""
        return lcm_all(f.size for f in self.factors if f.is_cyclic)

    @cached_property
    def generator_index(self) -> Dict[str, Tuple[int, int]]:
        return {name: (i, g) for i, f in enumerate(self.factors) for g, name in enumerate(f.names)}

    @property
    def generator_names(self) -> List[str]:
        return [name for f in self.factors for name in f.names]

    @property
    def has_default_names(self) -> bool:
        return self.generator_names == _default_names(len(self.generator_names))

    def __str__(self) -> str:
        if self.has_default_names:
            return '*'.join(f.symbol for f in self.factors)
        return '*'.join(f"{f.symbol}[{','.join(f.names)}]" for f in self.factors)

    def identity(self) -> 'Word':
        return Word(self, ())

    def generator(self, name: str) -> 'Word':
        if name not in self.generator_index:
            raise ParseException(f"Unknown generator {name!r}")
        i, g = self.generator_index[name]
        return Word.from_letters(self, [(i, g, 1)])

    def word(self, text: str) -> 'Word':
        return parse_word(text, self)


class Syllable(NamedTuple):
    factor: int
    payload: Union[int, Tuple[int, ...]]


def _free_reduce(letters: Iterable[int]) -> Tuple[int, ...]:
    stack: List[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def _combine(p: Presentation, left: Syllable, right: Syllable) -> Optional[Syllable]:
    f = p.factors[left.factor]
    if f.is_cyclic:
        t = (left.payload + right.payload) % f.size
        return Syllable(left.factor, t) if t else None
    letters = _free_reduce(left.payload + right.payload)
    return Syllable(left.factor, letters) if letters else None


def _normalize(p: Presentation, syllables: Iterable[Syllable]) -> Tuple[Syllable, ...]:
    stack: List[Syllable] = []
    for s in syllables:
        f = p.factors[s.factor]
        if f.is_cyclic:
            t = s.payload % f.size
            if not t:
                continue
            s = Syllable(s.factor, t)
        else:
            letters = _free_reduce(s.payload)
            if not letters:
                continue
            s = Syllable(s.factor, letters)
        while s is not None and stack and stack[-1].factor == s.factor:
            s = _combine(p, stack.pop(), s)
        if s is not None:
            stack.append(s)
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    presentation: Presentation
    syllables: Tuple[Syllable, ...] = field(default=())

    @classmethod
    def from_syllables(cls, p: Presentation, syllables: Iterable[Syllable]) -> 'Word':
        return cls(p, _normalize(p, syllables))

    @classmethod
    def from_letters(cls, p: Presentation, letters: Iterable[Tuple[int, int, int]]) -> 'Word':
        """Build from (factor, generator, exponent) triples."""
        raw = []
        for i, g, e in letters:
            if p.factors[i].is_cyclic:
                raw.append(Syllable(i, e))
            else:
                sign = 1 if e > 0 else -1
                raw.append(Syllable(i, tuple([sign * (g + 1)] * abs(e))))
        return cls.from_syllables(p, raw)

    # ── arithmetic ──────────────────────────────────────────

    def _check(self, other: 'Word'):
        if other.presentation != self.presentation:
            raise PresentationMismatchException("Cannot combine words over different presentations")

    def __mul__(self, other: 'Word') -> 'Word':
        self._check(other)
        return Word.from_syllables(self.presentation, self.syllables + other.syllables)

    def inverse(self) -> 'Word':
        p = self.presentation
        inv = []
        for s in reversed(self.syllables):
            if p.factors[s.factor].is_cyclic:
                inv.append(Syllable(s.factor, p.factors[s.factor].size - s.payload))
            else:
                inv.append(Syllable(s.factor, tuple(-x for x in reversed(s.payload))))
        return Word(p, tuple(inv))

    def __pow__(self, k: int) -> 'Word':
        """Square-and-multiply; a lone cyclic syllable reduces its exponent mod q."""
        p = self.presentation
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        if len(base.syllables) == 1 and p.factors[base.syllables[0].factor].is_cyclic:
            s = base.syllables[0]
            return Word.from_syllables(p, [Syllable(s.factor, s.payload * k % p.factors[s.factor].size)])
        result = Word(p, ())
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
            if max(result.letter_count, base.letter_count if k else 0) > MAX_WORD_LETTERS:
                raise InvalidInputException(
                    f"Power of {self} exceeds {MAX_WORD_LETTERS} letters after reduction")
        return result

    def __len__(self) -> int:
        return len(self.syllables)

    @property
    def letter_count(self) -> int:
        return sum(1 if isinstance(s.payload, int) else len(s.payload) for s in self.syllables)

    @property
    def is_trivial(self) -> bool:
        return not self.syllables

    def letters(self) -> List[Tuple[int, int, int]]:
        """Expanded (factor, generator, exponent) triples; cyclic syllables stay whole."""
        out = []
        for s in self.syllables:
            if self.presentation.factors[s.factor].is_cyclic:
                out.append((s.factor, 0, s.payload))
            else:
                out.extend((s.factor, abs(x) - 1, 1 if x > 0 else -1) for x in s.payload)
        return out

    # ── printing ────────────────────────────────────────────

    def to_text(self) -> str:
        if self.is_trivial:
            return '1'
        p = self.presentation
        tokens = []
        for s in self.syllables:
            f = p.factors[s.factor]
            if f.is_cyclic:
                name = f.names[0]
                tokens.append(name if s.payload == 1 else f"{name}^{s.payload}")
                continue
            run_letter, run = None, 0
            for x in s.payload + (0,):
                if x == run_letter:
                    run += 1
                    continue
                if run_letter is not None:
                    name = f.names[abs(run_letter) - 1]
                    exp = run if run_letter > 0 else -run
                    tokens.append(name if exp == 1 else f"{name}^{exp}")
                run_letter, run = x, 1
        return '*'.join(tokens)

    def __str__(self) -> str:
        return self.to_text()


# ── parsing ─────────────────────────────────────────────────

class _WordParser:
    """Recursive descent over: expr := term ('*'? term)* ; term := atom ('^' int)? ;
    atom := name | '1' | '(' expr ')'."""

    def __init__(self, text: str, p: Presentation):
        self.text = text
        self.p = p
        self.pos = 0
        self.names = sorted(p.generator_index, key=len, reverse=True)

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ''

    def parse(self) -> Word:
        word = self._expr()
        if self._peek():
            raise ParseException(f"Unexpected {self._peek()!r} in word {self.text!r}", self.pos)
        return word

    def _expr(self) -> Word:
        word = self.p.identity()
        after_star = False
        started = False
        while True:
            c = self._peek()
            if c == '' or c == ')':
                if after_star:
                    raise ParseException(f"Dangling '*' in word {self.text!r}", self.pos)
                return word
            if c == '*':
                if not started or after_star:
                    raise ParseException(f"Unexpected '*' in word {self.text!r}", self.pos)
                self.pos += 1
                after_star = True
                continue
            word = word * self._term()
            started = True
            after_star = False

    def _term(self) -> Word:
        atom = self._atom()
        if self._peek() == '^':
            self.pos += 1
            self._skip()
            m = re.match(r'[+-]?\d+', self.text[self.pos:])
            if not m:
                raise ParseException(f"Malformed exponent in word {self.text!r}", self.pos)
            self.pos += m.end()
            atom = atom ** int(m.group(0))
        return atom

    def _atom(self) -> Word:
        c = self._peek()
        if c == '(':
            self.pos += 1
            inner = self._expr()
            if self._peek() != ')':
                raise ParseException(f"Unbalanced parenthesis in word {self.text!r}", self.pos)
            self.pos += 1
            return inner
        if c == '1':
            self.pos += 1
            return self.p.identity()
        for name in self.names:
            if self.text.startswith(name, self.pos):
                self.pos += len(name)
                return self.p.generator(name)
        m = re.match(r'[A-Za-z][A-Za-z0-9_]*', self.text[self.pos:])
        token = m.group(0) if m else c
        raise ParseException(f"Unknown generator {token!r} in word {self.text!r}", self.pos)


def parse_word(text: str, p: Presentation) -> Word:
    if text is None:
        raise ParseException("Missing word")
    return _WordParser(text, p).parse()


# ── reduction, roots, torsion ───────────────────────────────

def inverse(w: Word) -> Word:
    return w.inverse()


def power(w: Word, k: int) -> Word:
    return w ** k


def m_of(p: Presentation) -> int:
    return p.m


def is_cyclically_reduced(w: Word) -> bool:
    if len(w) >= 2:
        return w.syllables[0].factor != w.syllables[-1].factor
    if len(w) == 1 and not w.presentation.factors[w.syllables[0].factor].is_cyclic:
        letters = w.syllables[0].payload
        return len(letters) < 2 or letters[0] != -letters[-1]
    return True


def cyclic_reduce(w: Word) -> Tuple[Word, Word]:
    """Return (w', c) with w = c * w' * c^-1 and w' cyclically reduced."""
    p = w.presentation
    conj = p.identity()
    cur = w
    while len(cur) >= 2 and cur.syllables[0].factor == cur.syllables[-1].factor:
        first = Word(p, cur.syllables[:1])
        cur = first.inverse() * cur * first
        conj = conj * first
    if len(cur) == 1 and not p.factors[cur.syllables[0].factor].is_cyclic:
        i, letters = cur.syllables[0]
        k = 0
        while len(letters) - 2 * k >= 2 and letters[k] == -letters[len(letters) - 1 - k]:
            k += 1
        if k:
            conj = conj * Word(p, (Syllable(i, letters[:k]),))
            cur = Word(p, (Syllable(i, letters[k:len(letters) - k]),))
    return cur, conj


def _smallest_period(seq: tuple) -> int:
    n = len(seq)
    for d in divisors(n):
        if seq == seq[:d] * (n // d):
            return d
    return n


TRIVIAL = 'trivial'
TORSION = 'torsion'
INFINITE = 'infinite'


@dataclass(frozen=True)
class ElementClass:
    kind: str
    reduced: Word
    conjugator: Word
    factor: Optional[int] = None
    exponent: Optional[int] = None
    root: Optional[Word] = None
    power: int = 1

    @property
    def is_trivial(self) -> bool:
        return self.kind == TRIVIAL

    @property
    def is_torsion(self) -> bool:
        return self.kind == TORSION

    @property
    def is_infinite(self) -> bool:
        return self.kind == INFINITE

    @property
    def order(self) -> Optional[int]:
        """Element order for torsion classes."""
        if not self.is_torsion:
            return None
        q = self.reduced.presentation.factors[self.factor].size
        return q // math.gcd(q, self.exponent)


def classify(w: Word) -> ElementClass:
    p = w.presentation
    reduced, conj = cyclic_reduce(w)
    if reduced.is_trivial:
        return ElementClass(TRIVIAL, reduced, conj)
    if len(reduced) == 1:
        i, payload = reduced.syllables[0]
        if p.factors[i].is_cyclic:
            return ElementClass(TORSION, reduced, conj, factor=i, exponent=payload)
        period = _smallest_period(payload)
        root = Word(p, (Syllable(i, payload[:period]),))
        return ElementClass(INFINITE, reduced, conj, root=root, power=len(payload) // period)
    period = _smallest_period(reduced.syllables)
    root = Word(p, reduced.syllables[:period])
    return ElementClass(INFINITE, reduced, conj, root=root, power=len(reduced) // period)
