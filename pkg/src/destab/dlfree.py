"""Free Dyer-Lashof modules ``R_s M`` with their Nishida Steenrod action.

A monomial is stored in lower-index form: ``(L, g, k)`` stands for
``Q_{L[0]} Q_{L[1]} ... Q_{L[-1]} x`` where ``x`` is basis element ``k`` of
``M`` in degree ``g``, ``L[0]`` is the outermost operation and
``Q_i y = Q^{|y| + i} y``.  The monomial is admissible when
``0 <= L[0] <= L[1] <= ...``, and its degree is
``2^s g + sum_k L[k] 2^k``.

The Dyer-Lashof relations only see degrees, so the rewriting functions
work with a generator degree alone and return sets of lower-index tuples.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from .amodule import FModule, GradedMap, GradedModule, suspend
from .errors import TruncationInsufficient
from .f2linalg import F2Matrix, bits
from .steenrod import binom2


def lower_degree(L: tuple, g: int) -> int:
    d = g
    for i in reversed(L):
        d = 2 * d + i
    return d


def to_upper(L: tuple, g: int) -> tuple:
    """Upper indices, outermost first, of the monomial ``Q_L x``."""
    out = []
    d = g
    for i in reversed(L):
        out.append(d + i)
        d = 2 * d + i
    return tuple(reversed(out))


def is_admissible(L: tuple) -> bool:
    return all(i >= 0 for i in L) and all(L[k] <= L[k + 1] for k in range(len(L) - 1))


def _xor_into(acc: set, items: Iterable) -> None:
    for t in items:
        if t in acc:
            acc.remove(t)
        else:
            acc.add(t)


@lru_cache(maxsize=None)
def apply_upper(j: int, L: tuple, g: int) -> frozenset:
    """``Q^j`` applied to the admissible monomial ``Q_L x`` with ``|x| = g``.

    Returns the admissible lower-index tuples of the normal form.
    """
    d = lower_degree(L, g)
    if j < d:
        return frozenset()
    low = j - d
    if not L or low <= L[0]:
        return frozenset({(low,) + L})
    # Q^j Q^a with j > 2a: Q^j Q^a = sum_i binom(i-a-1, 2i-j) Q^{j+a-i} Q^i
    inner = L[1:]
    a = L[0] + lower_degree(inner, g)
    acc: set = set()
    for i in range((j + 1) // 2, j - a):
        if binom2(i - a - 1, 2 * i - j):
            for mid in apply_upper(i, inner, g):
                _xor_into(acc, apply_upper(j + a - i, mid, g))
    return frozenset(acc)


def dl_adem_normalize(word: Iterable[int], g: int) -> frozenset:
    """Normal form of ``Q^{j1} ... Q^{js} x`` (upper indices, outermost first)."""
    terms = {()}
    for j in reversed(tuple(word)):
        acc: set = set()
        for L in terms:
            _xor_into(acc, apply_upper(j, L, g))
        terms = acc
        if not terms:
            break
    return frozenset(terms)


@lru_cache(maxsize=None)
def lower_sequences(s: int, total: int, floor: int = 0) -> tuple:
    """Nondecreasing ``(i_0, ..., i_{s-1})`` with ``i_0 >= floor`` and ``sum i_k 2^k = total``."""
    if s == 0:
        return ((),) if total == 0 else ()
    out = []
    # i_0 has weight 1 and the rest is a length s-1 sequence scaled by 2
    rest_min = (2 ** s - 2) * floor
    i0 = floor
    while i0 + rest_min <= total:
        rem = total - i0
        if rem % 2 == 0:
            for tail in lower_sequences(s - 1, rem // 2, i0):
                out.append((i0,) + tail)
        i0 += 1
        rest_min = (2 ** s - 2) * i0
    return tuple(out)


def format_monomial(L: tuple, g: int, label: str) -> str:
    if not L:
        return label
    return "".join(f"Q^{j}" for j in to_upper(L, g)) + " " + label


class FreeDLModule(GradedModule):
    """``R_s M``: admissible monomials of length ``s`` on the basis of ``M``.

    Built lazily degree by degree.  The Steenrod action comes from the
    Nishida relations applied recursively from the outside in.
    """

    def __init__(self, base: FModule, s: int):
        if s < 0:
            raise ValueError("s must be >= 0")
        self.base = base
        self.s = s
        self.name = f"R_{s}({base.name})"
        self.top = None if base.top is None else (2 ** s) * (base.top + 1) - 1
        self._basis: dict[int, tuple] = {}
        self._index: dict[int, dict] = {}
        self._sq_cache: dict = {}
        self._sq_mats: dict = {}

    def bottom(self) -> int:
        return (2 ** self.s) * self.base.bottom()

    def basis(self, n: int) -> tuple:
        got = self._basis.get(n)
        if got is not None:
            return got
        self.check_degree(n)
        out = []
        scale = 2 ** self.s
        for g in self.base.degrees():
            if scale * g > n:
                break
            for L in lower_sequences(self.s, n - scale * g):
                for k in range(self.base.dim(g)):
                    out.append((L, g, k))
        out.sort(key=lambda m: (m[1], m[2], m[0]))
        got = tuple(out)
        self._basis[n] = got
        self._index[n] = {m: j for j, m in enumerate(got)}
        return got

    def dim(self, n: int) -> int:
        return len(self.basis(n))

    def index(self, n: int) -> dict:
        self.basis(n)
        return self._index[n]

    def labels(self, n: int) -> list[str]:
        return [format_monomial(L, g, self.base.labels(g)[k]) for L, g, k in self.basis(n)]

    def vector(self, monos: Iterable, n: int) -> int:
        idx = self.index(n)
        v = 0
        for m in monos:
            v ^= 1 << idx[m]
        return v

    def monomials(self, v: int, n: int) -> list:
        b = self.basis(n)
        return [b[j] for j in bits(v)]

    def sq_mono(self, mono: tuple, r: int) -> frozenset:
        """``(Q_L x) Sq^r`` as a set of admissible monomials."""
        if r == 0:
            return frozenset({mono})
        key = (mono, r)
        got = self._sq_cache.get(key)
        if got is not None:
            return got
        L, g, k = mono
        if not L:
            col = self.base.sq(r, g).apply(1 << k)
            out = frozenset(((), g - r, t) for t in bits(col))
        else:
            inner = (L[1:], g, k)
            j = L[0] + lower_degree(L[1:], g)
            acc: set = set()
            # (Q^j y) Sq^r = sum_i binom(j-r, r-2i) Q^{j-r+i}(y Sq^i)
            for i in range(r // 2 + 1):
                if not binom2(j - r, r - 2 * i):
                    continue
                for Lz, gz, kz in self.sq_mono(inner, i):
                    for Lnew in apply_upper(j - r + i, Lz, gz):
                        _xor_into(acc, [(Lnew, gz, kz)])
            out = frozenset(acc)
        self._sq_cache[key] = out
        return out

    def sq(self, i: int, n: int) -> F2Matrix:
        key = (i, n)
        got = self._sq_mats.get(key)
        if got is not None:
            return got
        src = self.basis(n)
        if i == 0:
            mat = F2Matrix.identity(len(src))
        else:
            tgt_n = n - i
            if tgt_n < self.bottom():
                mat = F2Matrix.zeros(0, len(src))
            else:
                cols = [self.vector(self.sq_mono(m, i), tgt_n) for m in src]
                mat = F2Matrix.from_columns(cols, self.dim(tgt_n))
        self._sq_mats[key] = mat
        return mat

    def __repr__(self):
        return f"FreeDLModule({self.name}, top={self.top})"


_RS_CACHE: dict = {}


def build_rs(m: FModule, s: int, max_degree: int | None = None) -> FreeDLModule:
    """``R_s M``, shared per ``(module, s)`` so caches are reused.

    ``max_degree`` is checked against the authoritative bound when given.
    """
    key = (m, s)
    got = _RS_CACHE.get(key)
    if got is None:
        got = FreeDLModule(m, s)
        _RS_CACHE[key] = got
    if max_degree is not None and got.top is not None and max_degree > got.top:
        raise TruncationInsufficient(
            f"{got.name} is only determined through degree {got.top}, not {max_degree}"
        )
    return got


def apply_q(i: int, R: FreeDLModule, v: int, n: int, target: FreeDLModule | None = None) -> tuple[int, int]:
    """``Q^i`` on an element of ``R_s M`` in degree ``n``; returns ``(vector, degree)`` in ``R_{s+1} M``."""
    if target is None:
        target = build_rs(R.base, R.s + 1)
    out_n = n + i
    acc: set = set()
    for L, g, k in R.monomials(v, n):
        _xor_into(acc, [(Ln, g, k) for Ln in apply_upper(i, L, g)])
    if not acc:
        return 0, out_n
    return target.vector(acc, out_n), out_n


def q0_matrix(R_prev: FreeDLModule, R: FreeDLModule, n: int) -> F2Matrix:
    """``q_0``: ``(R_{s-1}M)_n = Phi(R_{s-1}M)_{2n} -> (R_s M)_{2n}``, prepending ``Q_0``."""
    src = R_prev.basis(n)
    cols = [R.vector([((0,) + L, g, k)], 2 * n) for L, g, k in src]
    return F2Matrix.from_columns(cols, R.dim(2 * n))


def epsilon_matrix(R: FreeDLModule, R_susp: FreeDLModule, n: int) -> F2Matrix:
    """``epsilon``: ``(R_s M)_n -> (R_s Sigma M)_{n+1}``, lowering every lower index.

    Monomials with ``i_0 = 0`` go to zero.
    """
    src = R.basis(n)
    cols = []
    for L, g, k in src:
        if L and L[0] == 0:
            cols.append(0)
        else:
            Ln = tuple(i - 1 for i in L)
            cols.append(R_susp.vector([(Ln, g + 1, k)], n + 1))
    return F2Matrix.from_columns(cols, R_susp.dim(n + 1))


def epsilon(m: FModule, s: int, degrees: Iterable[int]) -> GradedMap:
    """The graded map ``R_s M -> Sigma^{-1} R_s Sigma M`` on the given degrees (shift +1 on the target)."""
    R = build_rs(m, s)
    Rs = build_rs(suspend(m, 1), s)
    return GradedMap(R, Rs, 1, {n: epsilon_matrix(R, Rs, n) for n in degrees})


def q0_map(m: FModule, s: int, degrees: Iterable[int]) -> GradedMap:
    """``q_0: Phi(R_{s-1}M) -> R_s M`` on the given even degrees of the target."""
    Rp = build_rs(m, s - 1)
    R = build_rs(m, s)
    blocks = {}
    for n in degrees:
        if n % 2 == 0:
            blocks[n] = q0_matrix(Rp, R, n // 2)
    return GradedMap(Rp, R, 0, blocks)
