"""The mod 2 Steenrod algebra in the admissible basis.

Words are tuples of positive exponents ``(i1, ..., ik)`` read left to right
as ``Sq^i1 Sq^i2 ... Sq^ik``.  A word is admissible when ``i_j >= 2 i_{j+1}``.
Sums are frozensets of admissible words; presence means coefficient 1.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

SqWord = tuple
SqSum = frozenset

ZERO: SqSum = frozenset()
ONE: SqSum = frozenset({()})


def binom2(a: int, b: int) -> int:
    """``binom(a, b) mod 2`` with the 2-adic convention for negative ``a``.

    Python's ``&`` already treats negative ints as having an infinite tail
    of ones, so Lucas' digit test applies verbatim.
    """
    if b < 0:
        return 0
    return 1 if (a & b) == b else 0


def is_admissible(word: Iterable[int]) -> bool:
    w = tuple(word)
    return all(i > 0 for i in w) and all(w[j] >= 2 * w[j + 1] for j in range(len(w) - 1))


def adem(a: int, b: int) -> SqSum:
    """``Sq^a Sq^b`` for ``0 < a < 2b`` as a sum of length <= 2 words."""
    out: set = set()
    for j in range(a // 2 + 1):
        if binom2(b - 1 - j, a - 2 * j):
            w = tuple(e for e in (a + b - j, j) if e)
            out ^= {w}
    return frozenset(out)


def _xor(acc: set, terms: Iterable) -> None:
    for t in terms:
        if t in acc:
            acc.remove(t)
        else:
            acc.add(t)


@lru_cache(maxsize=None)
def adem_normalize_sq(word: tuple) -> SqSum:
    """Rewrite a word (zeros allowed, read as ``Sq^0 = 1``) to admissible form.

    The leftmost inadmissible pair is rewritten first; the cache makes
    repeated subwords cheap.
    """
    w = tuple(i for i in word if i)
    if any(i < 0 for i in w):
        return ZERO
    for j in range(len(w) - 1):
        a, b = w[j], w[j + 1]
        if a < 2 * b:
            acc: set = set()
            head, tail = w[:j], w[j + 2:]
            for mid in adem(a, b):
                _xor(acc, adem_normalize_sq(head + mid + tail))
            return frozenset(acc)
    return frozenset({w})


def normalize_sum(words: Iterable[tuple]) -> SqSum:
    acc: set = set()
    for w in words:
        _xor(acc, adem_normalize_sq(tuple(w)))
    return frozenset(acc)


def multiply(x: Iterable[tuple], y: Iterable[tuple]) -> SqSum:
    """Product in the Steenrod algebra of two sums of words."""
    acc: set = set()
    ys = list(y)
    for a in x:
        for b in ys:
            _xor(acc, adem_normalize_sq(tuple(a) + tuple(b)))
    return frozenset(acc)


def degree(word: tuple) -> int:
    return sum(word)


@lru_cache(maxsize=None)
def _admissible(n: int, bound: int) -> tuple:
    # admissible words of degree n whose first exponent is <= bound
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, bound), 0, -1):
        for rest in _admissible(n - first, first // 2):
            out.append((first,) + rest)
    return tuple(out)


def admissible_basis(n: int, max_degree: int | None = None) -> list:
    """Admissible words of degree ``n``, in descending lexicographic order.

    So degree 3 gives ``[(3,), (2, 1)]``.
    """
    if n < 0 or (max_degree is not None and n > max_degree):
        return []
    return list(_admissible(n, n))


def poincare_series(max_degree: int) -> list[int]:
    """Coefficients of ``prod_k 1/(1 - t^(2^k - 1))`` through ``max_degree``."""
    coeffs = [1] + [0] * max_degree
    k = 1
    while (1 << k) - 1 <= max_degree:
        step = (1 << k) - 1
        for n in range(step, max_degree + 1):
            coeffs[n] += coeffs[n - step]
        k += 1
    return coeffs


def format_word(word: tuple) -> str:
    if not word:
        return "1"
    return "".join(f"Sq{i}" for i in word)


def format_sum(s: Iterable[tuple]) -> str:
    terms = sorted(s, reverse=True)
    return " + ".join(format_word(w) for w in terms) if terms else "0"
