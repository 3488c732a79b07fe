"""
Homomorphisms Gamma -> Sym(N) as numpy permutation arrays.

A permutation is an int array ``s`` of length N sending point x to ``s[x]``.
Words act on the right: evaluating ``a*b`` applies a first, then b.
Batch helpers operate on (B, N) arrays, one permutation per row.
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from freeprod.core.exceptions import InvalidInputException, PresentationMismatchException
from freeprod.models.group import Presentation, Word


@dataclass(frozen=True, eq=False)
class Hom:
    presentation: Presentation
    N: int
    images: Tuple[Tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        if len(self.images) != len(self.presentation.factors):
            raise InvalidInputException("Hom needs one image tuple per factor")
        for f, imgs in zip(self.presentation.factors, self.images):
            if len(imgs) != f.rank:
                raise InvalidInputException(f"{f.symbol} needs {f.rank} image permutation(s)")
            for s in imgs:
                if s.shape != (self.N,):
                    raise InvalidInputException("Image permutation has the wrong degree")

    def is_valid(self) -> bool:
        """Check the order conditions sigma^q = id on every cyclic factor."""
        ident = np.arange(self.N)
        for f, imgs in zip(self.presentation.factors, self.images):
            if any(not np.array_equal(np.sort(s), ident) for s in imgs):
                return False
            if f.is_cyclic:
                cur = ident
                for _ in range(f.size):
                    cur = imgs[0][cur]
                if not np.array_equal(cur, ident):
                    return False
        return True


def _apply_word(images: Sequence[Sequence[np.ndarray]], inverses: Dict, w: Word, start: np.ndarray) -> np.ndarray:
    p = w.presentation
    r = start
    for i, g, e in w.letters():
        if p.factors[i].is_cyclic:
            s = images[i][0]
            for _ in range(e):
                r = np.take_along_axis(s, r, axis=-1)
            continue
        if e > 0:
            s = images[i][g]
        else:
            if (i, g) not in inverses:
                inverses[(i, g)] = np.argsort(images[i][g], axis=-1)
            s = inverses[(i, g)]
        r = np.take_along_axis(s, r, axis=-1)
    return r


def evaluate(hom: Hom, w: Word) -> np.ndarray:
    if w.presentation != hom.presentation:
        raise PresentationMismatchException("Word and homomorphism use different presentations")
    return _apply_word(hom.images, {}, w, np.arange(hom.N))


def evaluate_batch(images: Sequence[Sequence[np.ndarray]], w: Word) -> np.ndarray:
    """Evaluate ``w`` on a batch; ``images[i][g]`` is a (B, N) array."""
    first = next(iter(images[0]))
    batch, n = first.shape
    start = np.broadcast_to(np.arange(n), (batch, n)).copy()
    return _apply_word(images, {}, w, start)


def fix_count(perm: np.ndarray) -> int:
    return int(np.count_nonzero(perm == np.arange(perm.shape[-1])))


def batch_fix_counts(perms: np.ndarray) -> np.ndarray:
    return np.count_nonzero(perms == np.arange(perms.shape[-1]), axis=-1)


def batch_cycle_counts(perms: np.ndarray, max_len: int) -> np.ndarray:
    """(B, max_len) array; column L-1 counts the L-cycles of each row."""
    perms = np.atleast_2d(perms)
    batch, n = perms.shape
    ident = np.arange(n)
    period = np.zeros((batch, n), dtype=np.int64)
    cur = perms
    for k in range(1, max_len + 1):
        period[(period == 0) & (cur == ident)] = k
        cur = np.take_along_axis(perms, cur, axis=-1)
    counts = np.zeros((batch, max_len), dtype=np.int64)
    for k in range(1, max_len + 1):
        counts[:, k - 1] = np.count_nonzero(period == k, axis=-1) // k
    return counts
