"""Naive rewriting oracles shared by the unit and acceptance tests."""

import itertools
from functools import lru_cache

from destab.dlfree import dl_adem_normalize, to_upper
from destab.steenrod import adem, binom2


def sq_words(max_len, max_degree):
    for length in range(1, max_len + 1):
        for w in itertools.product(range(1, max_degree + 1), repeat=length):
            if sum(w) <= max_degree:
                yield w


@lru_cache(maxsize=None)
def sq_nf_by(word, pick):
    """Normal form rewriting the inadmissible pair chosen by ``pick``."""
    bad = [j for j in range(len(word) - 1) if word[j] < 2 * word[j + 1]]
    if not bad:
        return frozenset({word})
    j = pick(bad)
    acc = set()
    for mid in adem(word[j], word[j + 1]):
        acc ^= set(sq_nf_by(word[:j] + mid + word[j + 2:], pick))
    return frozenset(acc)


def dl_words(max_len, max_degree, g):
    for length in range(1, max_len + 1):
        for w in itertools.product(range(0, max_degree + 1), repeat=length):
            if g + sum(w) <= max_degree:
                yield w


@lru_cache(maxsize=None)
def dl_nf_by(word, g, pick):
    """Normal form of ``Q^word x`` by naive rewriting.

    Upper indices, outermost first.  Terms with some ``Q^j`` below the
    degree it acts on are dropped; inadmissible pairs ``Q^r Q^s`` with
    ``r > 2s`` are rewritten at the position chosen by ``pick``.
    """
    d = g
    for j in reversed(word):
        if j < d:
            return frozenset()
        d += j
    bad = [p for p in range(len(word) - 1) if word[p] > 2 * word[p + 1]]
    if not bad:
        return frozenset({word})
    p = pick(bad)
    r, s = word[p], word[p + 1]
    acc = set()
    for i in range((r + 1) // 2, r - s):
        if binom2(i - s - 1, 2 * i - r):
            acc ^= set(dl_nf_by(word[:p] + (r + s - i, i) + word[p + 2:], g, pick))
    return frozenset(acc)


def dl_upper_nf(word, g):
    return frozenset(to_upper(L, g) for L in dl_adem_normalize(word, g))


def first(bad):
    return bad[0]


def last(bad):
    return bad[-1]


def middle(bad):
    return bad[len(bad) // 2]
