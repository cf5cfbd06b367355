"""Barcode modules, ``U_q(V)`` dimension series, page homology, and the
algebraic spectral sequence driver.

A barcode module here has columns ``k = 0..K`` (weight ``2^k``), each a
graded space indexed by internal degree, and maps ``q: V_k[d] -> V_{k+1}[2d]``.
A ``q`` block is stored only when both ends are inside the computed range;
a missing block means "unknown", and a bar running into it is open.

Bigrading: a class of weight ``w`` and internal degree ``n`` sits at chart
position ``(-w, w + n)``; the second coordinate is the total degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .amodule import FModule
from .dlfree import build_rs
from .errors import CompositeNonzero, DiamondViolation, PageMismatch, UnsupportedModule
from .f2linalg import F2Matrix, Subquotient, Subspace, bits, kernel_image
from . import singer


@dataclass
class BarcodeModule:
    """Columns ``dims[k][d]`` with degree-doubling maps ``q[(k, d)]``."""

    K: int
    dims: dict[int, dict[int, int]]
    q: dict[tuple[int, int], F2Matrix] = field(default_factory=dict)
    labels: dict[tuple[int, int], list[str]] = field(default_factory=dict)

    def dim(self, k: int, d: int) -> int:
        return self.dims.get(k, {}).get(d, 0)

    def degrees(self, k: int) -> list[int]:
        return sorted(d for d, n in self.dims.get(k, {}).items() if n)

    def in_range(self, k: int, d: int) -> bool:
        return d in self.dims.get(k, {})

    def q_block(self, k: int, d: int) -> F2Matrix | None:
        return self.q.get((k, d))

    def label(self, k: int, d: int) -> list[str]:
        got = self.labels.get((k, d))
        if got is not None:
            return got
        return [f"v{k}.{d}.{j}" for j in range(self.dim(k, d))]

    def total_dim(self) -> int:
        return sum(sum(c.values()) for c in self.dims.values())


@dataclass(frozen=True, order=True)
class Bar:
    """A chain ``x, qx, ..., q^{length-1} x`` starting at column ``k`` in degree ``d``.

    ``open`` bars run into the end of the computed range; ``length`` is then a
    lower bound.
    """

    k: int
    d: int
    length: int
    open: bool


def _chain_ranks(b: BarcodeModule, k: int, d: int) -> tuple[list[int], bool]:
    """Ranks of ``q^j`` out of ``V_k[d]`` for ``j = 0, 1, ...`` while known.

    The flag says whether the chain stops because ``q`` is unknown.
    """
    n = b.dim(k, d)
    mat = F2Matrix.identity(n)
    ranks = [n]
    kk, dd = k, d
    while True:
        if ranks[-1] == 0:
            return ranks, False
        blk = b.q_block(kk, dd)
        if blk is None:
            return ranks, True
        mat = blk @ mat
        kk, dd = kk + 1, 2 * dd
        ranks.append(kernel_image(mat)[1].dim)


def barcode_decompose(b: BarcodeModule) -> list[Bar]:
    """Bars from the rank formula, in canonical order."""
    bars = []
    for k in range(b.K + 1):
        for d in b.degrees(k):
            ranks, open_end = _chain_ranks(b, k, d)
            prev = [0] * (len(ranks) + 1)
            if k > 0 and d % 2 == 0 and b.in_range(k - 1, d // 2) and b.q_block(k - 1, d // 2) is not None:
                pranks, _ = _chain_ranks(b, k - 1, d // 2)
                for j in range(len(ranks)):
                    prev[j] = pranks[j + 1] if j + 1 < len(pranks) else 0
            starting = [ranks[j] - prev[j] for j in range(len(ranks))]
            for j in range(len(starting)):
                nxt = starting[j + 1] if j + 1 < len(starting) else 0
                last = j == len(starting) - 1
                if last and open_end:
                    count, is_open = starting[j], True
                else:
                    count, is_open = starting[j] - nxt, False
                bars.extend([Bar(k, d, j + 1, is_open)] * count)
    return sorted(bars)


Series = dict  # (weight, internal degree) -> dim


def _mul(a: Series, b: Series, W: int, T: int | None) -> Series:
    out: Series = {}
    for (w1, n1), c1 in a.items():
        for (w2, n2), c2 in b.items():
            w, n = w1 + w2, n1 + n2
            if w > W or (T is not None and w + n > T):
                continue
            out[(w, n)] = out.get((w, n), 0) + c1 * c2
    return out


def bar_factor(bar: Bar, W: int, T: int | None = None) -> Series:
    """``Z/2[x]/(x^{2^m})`` for a closed bar, ``Z/2[x]`` truncated for an open one."""
    w0 = 2 ** bar.k
    out: Series = {}
    e = 0
    limit = None if bar.open else 2 ** bar.length
    while limit is None or e < limit:
        w, n = e * w0, e * bar.d
        if w > W:
            break
        if T is None or w + n <= T or e == 0:
            out[(w, n)] = 1
        elif bar.d >= -w0:
            # total degree only grows from here on
            break
        e += 1
    return out


def uq_series(b: BarcodeModule, W: int | None = None, T: int | None = None) -> Series:
    """Bigraded dimensions of ``U_q(V)`` for weights ``<= W`` and total degree ``<= T``."""
    if W is None:
        W = 2 ** (b.K + 1) - 1
    series: Series = {(0, 0): 1}
    for bar in barcode_decompose(b):
        series = _mul(series, bar_factor(bar, W, T), W, T)
    return {key: v for key, v in series.items() if v}


def series_by_total(series: Series) -> dict[int, int]:
    out: dict[int, int] = {}
    for (w, n), c in series.items():
        out[w + n] = out.get(w + n, 0) + c
    return dict(sorted(out.items()))


@dataclass
class DiffBarcode:
    """A barcode module with one differential component ``V_s -> V_t``.

    ``d[deg]`` maps ``V_s[deg]`` to ``V_t[deg + shift]``.  When the target
    degree lies outside the computed part of column ``t`` the block maps to
    an auxiliary space, which is enough to compute the kernel.
    """

    barcode: BarcodeModule
    s: int
    t: int
    shift: int
    d: dict[int, F2Matrix]


def check_diamond(b: BarcodeModule, t: int) -> None:
    """``q`` must be monic on columns ``t <= k < K`` (the top column is ignored)."""
    for k in range(t, b.K):
        for d in b.degrees(k):
            blk = b.q_block(k, d)
            if blk is None:
                continue
            ker, _ = kernel_image(blk)
            if ker.dim:
                raise DiamondViolation(f"q is not monic on column {k}, degree {d}")


@dataclass
class _NewColumn:
    reps: list[int]
    sq: Subquotient


def page_homology(p: DiffBarcode) -> BarcodeModule:
    """Primitives of ``H(U_q(V); d)`` under condition ``diamond_t``.

    Columns below ``t`` other than ``s`` are unchanged, column ``s`` becomes
    ``ker d``, and column ``k >= t`` becomes ``V_k / q^{k-t} im d``.
    """
    b, s, t = p.barcode, p.s, p.t
    if not s < t:
        raise ValueError("need s < t")
    check_diamond(b, t)
    for (k, d), blk in b.q.items():
        if k == s - 1:
            dm = p.d.get(2 * d)
            if dm is not None and not (dm @ blk).is_zero():
                raise CompositeNonzero(f"d q != 0 from column {k}, degree {d}")
    # image subspaces to quotient by, column by column
    quot: dict[tuple[int, int], Subspace] = {}
    for e in b.degrees(t) + [e for e in b.dims.get(t, {}) if not b.dims[t][e]]:
        quot[(t, e)] = Subspace(b.dim(t, e))
    for deg, dm in p.d.items():
        e = deg + p.shift
        if b.in_range(t, e):
            if dm.nrows != b.dim(t, e):
                raise ValueError("differential block has the wrong target size")
            quot[(t, e)] = Subspace(b.dim(t, e), dm.columns)
    for k in range(t, b.K):
        for e in b.dims.get(k, {}):
            src = quot.get((k, e), Subspace(b.dim(k, e)))
            if b.in_range(k + 1, 2 * e):
                blk = b.q_block(k, e)
                vecs = [blk.apply(v) for v in src.basis] if blk is not None else []
                quot[(k + 1, 2 * e)] = Subspace(b.dim(k + 1, 2 * e), vecs)
    cols: dict[tuple[int, int], _NewColumn] = {}
    for k in range(b.K + 1):
        for e, n in b.dims.get(k, {}).items():
            if k == s:
                dm = p.d.get(e)
                ker = kernel_image(dm)[0] if dm is not None else Subspace.full(n)
                sq = Subquotient(ker, Subspace(n))
            elif k >= t:
                sq = Subquotient(Subspace.full(n), quot.get((k, e), Subspace(n)))
            else:
                sq = Subquotient(Subspace.full(n), Subspace(n))
            cols[(k, e)] = _NewColumn(list(sq.reps), sq)
    dims = {k: {e: len(cols[(k, e)].reps) for e in b.dims.get(k, {})} for k in range(b.K + 1)}
    q = {}
    labels = {}
    for (k, e), col in cols.items():
        old = b.label(k, e)
        labels[(k, e)] = ["+".join(old[j] for j in bits(v)) for v in col.reps]
        blk = b.q_block(k, e)
        if blk is None or (k + 1, 2 * e) not in cols:
            continue
        tgt = cols[(k + 1, 2 * e)]
        try:
            q[(k, e)] = F2Matrix.from_columns(
                [tgt.sq.project(blk.apply(v)) for v in col.reps], len(tgt.reps)
            )
        except ValueError:
            raise PageMismatch(f"q does not preserve the subquotient at column {k}, degree {e}") from None
    return BarcodeModule(b.K, dims, q, labels)


def same_barcode(a: BarcodeModule, b: BarcodeModule) -> bool:
    return a.K == b.K and a.dims == b.dims and barcode_decompose(a) == barcode_decompose(b)


# --- brute force homology of U_q(V) -------------------------------------

def uq_homology_oracle(p: DiffBarcode, W: int | None = None) -> Series:
    """Homology of ``(U_q(V), d)`` by enumerating squarefree monomials.

    Squarefree products of a basis of ``V`` form a basis of ``U_q(V)``;
    products reduce with ``v^2 = q(v)``.  Where ``q`` is unknown (the top
    column, or the edge of the computed range) it is continued freely:
    fresh basis elements are added for the squares, as many columns up as
    the weights require.  That is the monic continuation ``diamond_t`` asks for.
    """
    b = p.barcode
    if W is None:
        W = 2 ** (b.K + 1) - 1
    # chains are needed one differential step above the reported weights
    dw = 2 ** p.t - 2 ** p.s
    report, W = W, W + dw
    dims = {k: dict(c) for k, c in b.dims.items()}
    qmap: dict[tuple[int, int], list[list[int]]] = {}
    k = 0
    while 2 ** (k + 1) <= W:
        for e, n in sorted(dims.get(k, {}).items()):
            blk = b.q_block(k, e) if k < b.K else None
            if blk is not None:
                qmap[(k, e)] = [list(bits(c)) for c in blk.columns]
            elif n:
                col = dims.setdefault(k + 1, {})
                m = col.get(2 * e, 0)
                col[2 * e] = m + n
                qmap[(k, e)] = [[m + j] for j in range(n)]
        k += 1
    elems = []
    where = {}
    for k in sorted(dims):
        for e in sorted(dims[k]):
            for j in range(dims[k][e]):
                where[(k, e, j)] = len(elems)
                elems.append((k, e, j))
    weight = [2 ** k for k, _, _ in elems]
    ideg = [e for _, e, _ in elems]

    def q_of(i):
        k, e, j = elems[i]
        cols = qmap.get((k, e))
        if cols is None:
            return []
        return [where[(k + 1, 2 * e, r)] for r in cols[j]]

    def d_of(i):
        k, e, j = elems[i]
        if k != p.s or e not in p.d:
            return []
        tgt = e + p.shift
        col = p.d[e].columns[j]
        if col and not b.in_range(p.t, tgt):
            raise ValueError("oracle needs every differential target inside the module")
        return [where[(p.t, tgt, r)] for r in bits(col)]

    qs = [q_of(i) for i in range(len(elems))]
    ds = [d_of(i) for i in range(len(elems))]

    def wt(mono: int) -> int:
        return sum(weight[i] for i in bits(mono))

    def times(mono: int, i: int) -> dict:
        # mono * elems[i] as {monomial: 1}
        if wt(mono) + weight[i] > W:
            return {}
        if not (mono >> i) & 1:
            return {mono | (1 << i): 1}
        rest = mono & ~(1 << i)
        out: dict = {}
        for r in qs[i]:
            for m, _ in times(rest, r).items():
                out[m] = out.get(m, 0) ^ 1
        return {m: 1 for m, c in out.items() if c}

    # basis monomials by bidegree
    by_deg: dict[tuple[int, int], list[int]] = {}
    n = len(elems)
    for mono in range(1 << n):
        w = wt(mono)
        if w > W:
            continue
        key = (w, sum(ideg[i] for i in bits(mono)))
        by_deg.setdefault(key, []).append(mono)
    index = {key: {m: j for j, m in enumerate(ms)} for key, ms in by_deg.items()}

    def diff(mono: int) -> dict:
        out: dict = {}
        for i in bits(mono):
            rest = mono & ~(1 << i)
            for r in ds[i]:
                for m in times(rest, r):
                    out[m] = out.get(m, 0) ^ 1
        return {m for m, c in out.items() if c}

    ranks: dict[tuple[int, int], int] = {}
    for key, ms in by_deg.items():
        tkey = (key[0] + dw, key[1] + p.shift)
        cols = []
        for m in ms:
            v = 0
            for r in diff(m):
                v ^= 1 << index[tkey][r]
            cols.append(v)
        rows = len(by_deg.get(tkey, []))
        ranks[key] = kernel_image(F2Matrix.from_columns(cols, rows))[1].dim if rows else 0
    out: Series = {}
    for key, ms in by_deg.items():
        skey = (key[0] - dw, key[1] - p.shift)
        h = len(ms) - ranks[key] - ranks.get(skey, 0)
        if h and key[0] <= report:
            out[key] = h
    return out


# --- the spectral sequence ----------------------------------------------


@dataclass
class PageSpec:
    """Ranges for a run: columns ``0..K`` and total degree ``<= T``.

    ``requested`` records the total degree asked for when truncation of the
    input forced a smaller ``T``.
    """

    K: int
    T: int
    requested: int | None = None

    @property
    def W(self) -> int:
        return 2 ** (self.K + 1) - 1

    def max_internal(self, k: int) -> int:
        return self.T - 2 ** k

    @classmethod
    def for_module(cls, m: FModule, K: int, T: int) -> "PageSpec":
        """Clip ``T`` so every column is determined by the truncated input."""
        got = T
        for k in range(K + 2):
            cap = singer.l_bound(m, k)
            if cap is not None:
                got = min(got, cap + 2 ** k)
        return cls(K, got, T if got != T else None)


@dataclass
class SSPage:
    """Page ``E^{2^s}`` as primitive data: ``V(s)`` and the differential ``d_s``."""

    module: FModule
    s: int
    spec: PageSpec
    V: BarcodeModule
    diff: DiffBarcode
    reps: dict[tuple[int, int], list[int]]

    @property
    def r(self) -> int:
        return 2 ** self.s

    def series(self) -> Series:
        return uq_series(self.V, self.spec.W, self.spec.T)

    def differential_ranks(self) -> dict[int, int]:
        return {e: kernel_image(m)[1].dim for e, m in self.diff.d.items() if m.ncols and m.nrows}


def _check_bottom(m: FModule) -> None:
    if m.degrees() and m.bottom() < -1:
        raise UnsupportedModule("the spectral sequence driver needs a module vanishing below degree -1")


def _q_on_vector(Rk, Rk1, v: int, e: int) -> int:
    monos = [((0,) + L, g, j) for L, g, j in Rk.monomials(v, e)]
    return Rk1.vector(monos, 2 * e)


class _Column:
    """One column of ``V(s)``: a subquotient of ``R_k M`` in each degree."""

    def __init__(self, reps: list[int], project, labels: list[str]):
        self.reps = reps
        self.project = project
        self.labels = labels


def _rbar_quotient(m: FModule, k: int, s: int, e: int) -> Subspace:
    """``im(q^{k-s} d_{s-1})`` inside ``(R_k M)_e``."""
    Rk = build_rs(m, k)
    n = Rk.dim(e)
    if s == 0:
        return Subspace(n)
    step = 2 ** (k - s)
    if e % step:
        return Subspace(n)
    e0 = e // step
    Pm = singer.susp(m, -1)
    if e0 < build_rs(Pm, s - 1).bottom():
        return Subspace(n)
    dm = singer.d_matrix(Pm, s - 1, e0, 1)
    vecs = list(dm.columns)
    for j in range(s, k):
        Ra, Rb = build_rs(m, j), build_rs(m, j + 1)
        vecs = [_q_on_vector(Ra, Rb, v, e0 * 2 ** (j - s)) for v in vecs]
    return Subspace(n, vecs)


def _rbar_column(m: FModule, k: int, s: int, e: int) -> _Column:
    Rk = build_rs(m, k)
    n = Rk.dim(e)
    sq = Subquotient(Subspace.full(n), _rbar_quotient(m, k, s, e))
    labs = Rk.labels(e)
    return _Column(list(sq.reps), sq.project, ["+".join(labs[j] for j in bits(v)) for v in sq.reps])


def _l_column(m: FModule, k: int, e: int) -> _Column:
    sp = singer.l_subspace(m, k, e)
    h = singer.homology(m, k, e)
    sub = Subquotient(sp, Subspace(sp.ambient_dim))
    reps = [h.subquotient.lift(c) for c in sp.basis]
    labs = build_rs(m, k).labels(e)

    def project(v: int) -> int:
        return sub.project(singer._project(h, v, f"class in L_{k}"))

    return _Column(reps, project, ["+".join(labs[j] for j in bits(v)) for v in reps])


def build_V(m: FModule, s: int, spec: PageSpec) -> tuple[BarcodeModule, dict]:
    """``V(s)``: ``L_k M`` for ``k < s`` and ``R_{k,s}`` quotients for ``k >= s``."""
    _check_bottom(m)
    cols: dict[tuple[int, int], _Column] = {}
    for k in range(spec.K + 1):
        lo = build_rs(m, k).bottom()
        for e in range(lo, spec.max_internal(k) + 1):
            cols[(k, e)] = _l_column(m, k, e) if k < s else _rbar_column(m, k, s, e)
    return _assemble(m, spec, cols)


def _assemble(m: FModule, spec: PageSpec, cols: dict) -> tuple[BarcodeModule, dict]:
    dims: dict[int, dict[int, int]] = {}
    labels = {}
    reps = {}
    for (k, e), c in cols.items():
        dims.setdefault(k, {})[e] = len(c.reps)
        labels[(k, e)] = c.labels
        reps[(k, e)] = c.reps
    q = {}
    for (k, e), c in cols.items():
        tgt = cols.get((k + 1, 2 * e))
        if tgt is None:
            continue
        Rk, Rk1 = build_rs(m, k), build_rs(m, k + 1)
        vals = []
        for v in c.reps:
            w = _q_on_vector(Rk, Rk1, v, e)
            try:
                vals.append(tgt.project(w))
            except (ValueError, Exception) as exc:
                raise PageMismatch(f"q leaves the page at column {k}, degree {e}: {exc}") from None
        q[(k, e)] = F2Matrix.from_columns(vals, len(tgt.reps))
    for k in range(spec.K + 1):
        dims.setdefault(k, {})
    return BarcodeModule(spec.K, dims, q, labels), reps


def page_differential(m: FModule, s: int, spec: PageSpec, V: BarcodeModule, reps: dict) -> DiffBarcode:
    """``d_s: R_{s,s}[n] -> R_{s+1,s}[n-1]``, the explicit universal formula on representatives.

    Targets beyond the computed part of column ``s + 1`` are taken in
    auxiliary quotients so the kernel is still exact.
    """
    blocks = {}
    if s + 1 > spec.K:
        return DiffBarcode(V, s, s + 1, -1, blocks)
    for e in V.dims.get(s, {}):
        tgt_e = e - 1
        if V.in_range(s + 1, tgt_e):
            tcol = _rbar_column(m, s + 1, s, tgt_e)
        else:
            if tgt_e < build_rs(m, s + 1).bottom():
                blocks[e] = F2Matrix(0, V.dim(s, e))
                continue
            tcol = _rbar_column(m, s + 1, s, tgt_e)
        D = singer.d_matrix(m, s, e, 0)
        try:
            vals = [tcol.project(D.apply(v)) for v in reps[(s, e)]]
        except ValueError:
            raise PageMismatch(f"page differential out of column {s}, degree {e}") from None
        blocks[e] = F2Matrix.from_columns(vals, len(tcol.reps))
    _check_well_defined(m, s, spec, V)
    return DiffBarcode(V, s, s + 1, -1, blocks)


def _check_well_defined(m: FModule, s: int, spec: PageSpec, V: BarcodeModule) -> None:
    """``d_s`` carries ``im d_{s-1}`` into ``im(q d_{s-1})``."""
    if s == 0:
        return
    for e in V.dims.get(s, {}):
        Q = _rbar_quotient(m, s, s, e)
        if not Q.dim:
            continue
        tcol = _rbar_column(m, s + 1, s, e - 1)
        D = singer.d_matrix(m, s, e, 0)
        for v in Q.basis:
            if tcol.project(D.apply(v)):
                raise PageMismatch(f"d_{s} is not well defined on column {s}, degree {e}")


def build_page(m: FModule, s: int, spec: PageSpec) -> SSPage:
    V, reps = build_V(m, s, spec)
    diff = page_differential(m, s, spec, V, reps)
    return SSPage(m, s, spec, V, diff, reps)


@dataclass
class PageCheck:
    s: int
    kernel_is_L: bool
    cokernel_is_next: bool
    homology_matches_next_page: bool


def verify_transition(page: SSPage, nxt: SSPage) -> PageCheck:
    """Check the page ``s`` differential against independently computed data.

    ``ker d_s`` must be ``L_s M`` inside ``R_{s,s}``; the cokernel must have
    the dimensions of ``R_{s+1,s+1}``, with ``im`` of the Singer differential
    equal to ``im d_s + im(q d_{s-1})``; and the page homology must
    reproduce the next page's barcode.
    """
    m, s, spec = page.module, page.s, page.spec
    if s + 1 > spec.K:
        return PageCheck(s, True, True, True)
    for e in page.V.dims.get(s, {}):
        # kernel versus L_s
        blk = page.diff.d[e]
        ker = kernel_image(blk)[0]
        Lsp = singer.l_subspace(m, s, e)
        h = singer.homology(m, s, e)
        col = _rbar_column(m, s, s, e)
        # page reps are the rbar reps; L reps projected into rbar coordinates
        Lvecs = [col.project(h.subquotient.lift(c)) for c in Lsp.basis]
        if Subspace(ker.ambient_dim, Lvecs) != ker:
            raise PageMismatch(f"ker d_{s} differs from L_{s} in degree {e}")
    for e in page.V.dims.get(s + 1, {}):
        # image of the Singer differential versus im d_s + im(q d_{s-1})
        Pm = singer.susp(m, -1)
        R1 = build_rs(m, s + 1)
        singer_im = Subspace(R1.dim(e), singer.d_matrix(Pm, s, e, 1).columns)
        D = singer.d_matrix(m, s, e + 1, 0)
        page_im = Subspace(R1.dim(e), list(D.columns) + list(_rbar_quotient(m, s + 1, s, e).basis))
        if singer_im != page_im:
            raise PageMismatch(f"cokernel of d_{s} differs from R_{s + 1},{s + 1} in degree {e}")
    hom = page_homology(page.diff)
    if not same_barcode(hom, nxt.V):
        raise PageMismatch(f"homology of page {s} does not match page {s + 1}")
    return PageCheck(s, True, True, True)


@dataclass
class SSRun:
    module: FModule
    spec: PageSpec
    pages: list[SSPage]
    einf: BarcodeModule
    checks: list[PageCheck]

    def einf_series(self) -> Series:
        return uq_series(self.einf, self.spec.W, self.spec.T)


def run_ss(m: FModule, max_s: int, T: int, verify: bool = True) -> SSRun:
    """Pages ``s = 0..max_s`` with columns ``0..max_s``; ``E^infty = U_q(L_*)``."""
    spec = PageSpec.for_module(m, max_s, T)
    pages = [build_page(m, s, spec) for s in range(max_s + 1)]
    einf, _ = build_V(m, max_s + 1, spec)
    checks = []
    if verify:
        for s, page in enumerate(pages):
            if s + 1 < len(pages):
                nxt = pages[s + 1]
            else:
                nxt = SSPage(m, s + 1, spec, einf, DiffBarcode(einf, s + 1, s + 2, -1, {}), {})
            checks.append(verify_transition(page, nxt))
    return SSRun(m, spec, pages, einf, checks)


def random_diff_barcode(rng, K: int = 3, max_primitives: int = 6, max_degree: int = 12) -> DiffBarcode:
    """A random finite differential barcode module with ``diamond_t`` and ``d q = 0``.

    ``rng`` is a :class:`random.Random`.  The module is zero outside the
    listed degrees, so every ``q`` block is present.  Primitives come in
    ``q``-chains and source/target pairs so the maps are often nonzero.
    """
    while True:
        s = rng.randrange(0, K)
        t = rng.randrange(s + 1, K + 1)
        dims: dict[int, dict[int, int]] = {k: {} for k in range(K + 1)}

        def add(k, d):
            dims[k][d] = dims[k].get(d, 0) + 1

        budget = rng.randint(1, max_primitives)
        if budget >= 2 and rng.random() < 0.8:
            d = rng.randint(1, max_degree)
            add(s, d)
            add(t, d - 1)
            budget -= 2
        while budget:
            k = rng.randrange(0, K + 1)
            d = rng.randint(0, max_degree)
            for j in range(rng.randint(1, K + 1 - k)):
                if not budget or d * 2 ** j > max_degree:
                    break
                add(k + j, d * 2 ** j)
                budget -= 1
        b = BarcodeModule(K, dims)
        for k in range(K):
            for d, n in list(dims[k].items()):
                m = dims[k + 1].setdefault(2 * d, 0)
                b.q[(k, d)] = F2Matrix(m, n, [rng.getrandbits(n) for _ in range(m)])
        try:
            check_diamond(b, t)
        except DiamondViolation:
            continue
        blocks = {}
        for d, n in dims[s].items():
            m = dims[t].setdefault(d - 1, 0)
            # d has to vanish on the image of q from column s - 1
            img = Subspace(n)
            if s > 0 and d % 2 == 0 and (s - 1, d // 2) in b.q:
                img = Subspace(n, b.q[(s - 1, d // 2)].columns)
            sq = Subquotient(Subspace.full(n), img)
            images = [rng.getrandbits(m) for _ in range(sq.dim)]
            cols = []
            for j in range(n):
                c = 0
                for r in bits(sq.project(1 << j)):
                    c ^= images[r]
                cols.append(c)
            blocks[d] = F2Matrix.from_columns(cols, m)
        # new zero-dimensional target slots need q blocks too
        for k in range(K):
            for d, n in dims[k].items():
                if (k, d) not in b.q:
                    m = dims[k + 1].setdefault(2 * d, 0)
                    b.q[(k, d)] = F2Matrix(m, n, [0] * m)
        return DiffBarcode(b, s, t, -1, blocks)
