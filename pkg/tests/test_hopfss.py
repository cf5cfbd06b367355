import random

import pytest

from destab import hopfss, modlib, singer
from destab.dlfree import build_rs, dl_adem_normalize, to_upper
from destab.errors import CompositeNonzero, DiamondViolation
from destab.f2linalg import F2Matrix, rank
from destab.hopfss import Bar, BarcodeModule, DiffBarcode, barcode_decompose, page_homology, uq_series


def chain(K, d, q_rank=1):
    """One class in column 0, degree d, with q nonzero all the way up."""
    dims = {k: {d * 2 ** k: 1} for k in range(K + 1)}
    q = {(k, d * 2 ** k): F2Matrix(1, 1, [q_rank]) for k in range(K)}
    return BarcodeModule(K, dims, q)


def test_zero_q_gives_length_one_bars():
    b = BarcodeModule(1, {0: {1: 2}, 1: {2: 1}}, {(0, 1): F2Matrix.zeros(1, 2)})
    bars = barcode_decompose(b)
    assert bars == [Bar(0, 1, 1, False), Bar(0, 1, 1, False), Bar(1, 2, 1, True)]


def test_infinite_chain_is_open():
    assert barcode_decompose(chain(3, 1)) == [Bar(0, 1, 4, True)]


def test_rank_bookkeeping():
    b = BarcodeModule(1, {0: {1: 2}, 1: {2: 1}}, {(0, 1): F2Matrix(1, 2, [0b01])})
    b.q[(1, 2)] = F2Matrix(0, 1)
    b.dims.setdefault(2, {})[4] = 0
    b.K = 2
    assert barcode_decompose(b) == [Bar(0, 1, 1, False), Bar(0, 1, 2, False)]


def test_bars_reproduce_ranks():
    rng = random.Random(3)
    for _ in range(40):
        p = hopfss.random_diff_barcode(rng)
        b = p.barcode
        bars = barcode_decompose(b)
        for k in range(b.K + 1):
            for d in b.degrees(k):
                mat = F2Matrix.identity(b.dim(k, d))
                kk, dd = k, d
                for j in range(b.K - k + 1):
                    through = sum(
                        1 for bar in bars
                        if bar.k <= k and bar.d * 2 ** (k - bar.k) == d
                        and (bar.k + bar.length - 1 >= k + j or (bar.open and bar.k + bar.length - 1 == b.K))
                    )
                    assert rank(mat) == through
                    blk = b.q_block(kk, dd)
                    if blk is None:
                        break
                    mat = blk @ mat
                    kk, dd = kk + 1, 2 * dd


def test_exterior_series():
    b = BarcodeModule(1, {0: {3: 1}, 1: {6: 0}}, {(0, 3): F2Matrix(0, 1)})
    assert uq_series(b, W=3) == {(0, 0): 1, (1, 3): 1}


def test_missing_q_is_open():
    b = BarcodeModule(0, {0: {3: 1}})
    assert barcode_decompose(b) == [Bar(0, 3, 1, True)]
    assert uq_series(b, W=3) == {(e, 3 * e): 1 for e in range(4)}


def test_truncated_polynomial_series():
    for s in (1, 2, 3):
        b = chain(s - 1, 2)
        b.q[(s - 1, 2 * 2 ** (s - 1))] = F2Matrix(0, 1)
        b.dims[s] = {2 * 2 ** s: 0}
        b.K = s
        series = uq_series(b, W=40)
        assert series == {(e, 2 * e): 1 for e in range(2 ** s)}


def test_open_chain_is_polynomial():
    series = uq_series(chain(3, 0))
    assert series == {(e, 0): 1 for e in range(16)}


def test_hz_series():
    run = hopfss.run_ss(modlib.dual_hz(12), 3, 10)
    assert hopfss.series_by_total(run.einf_series()) == {t: 1 for t in range(11)}


def test_page_homology_zero_d():
    b = chain(2, 1)
    out = page_homology(DiffBarcode(b, 0, 1, -1, {}))
    assert barcode_decompose(out) == barcode_decompose(b)
    assert out.dims == b.dims


def test_diamond_violation():
    b = chain(3, 1, q_rank=0)
    with pytest.raises(DiamondViolation):
        page_homology(DiffBarcode(b, 0, 1, -1, {}))


def test_dq_nonzero_rejected():
    # x in column 0, q(x) in column 1, d: column 1 -> column 2 hits something
    b = BarcodeModule(2, {0: {1: 1}, 1: {2: 1}, 2: {1: 1, 4: 0}},
                      {(0, 1): F2Matrix(1, 1, [1]), (1, 2): F2Matrix(0, 1), (1, 1): F2Matrix(0, 0)})
    with pytest.raises(CompositeNonzero):
        page_homology(DiffBarcode(b, 1, 2, -1, {2: F2Matrix(1, 1, [1])}))


def test_kills_one_polynomial_generator():
    # y at (0, 0) polynomial; x at column 1, degree -1 with d(x) = x^2
    K = 3
    dims = {0: {0: 1}, 1: {0: 1, -1: 1}, 2: {0: 1, -2: 1}, 3: {0: 1, -4: 1}}
    q = {}
    for k in range(K):
        q[(k, 0)] = F2Matrix(1, 1, [1])
    q[(1, -1)] = F2Matrix(1, 1, [1])
    q[(2, -2)] = F2Matrix(1, 1, [1])
    b = BarcodeModule(K, dims, q)
    p = DiffBarcode(b, 1, 2, -1, {-1: F2Matrix(1, 1, [1]), 0: F2Matrix(1, 1, [0])})
    out = page_homology(p)
    assert out.dim(1, -1) == 0 and out.dim(2, -2) == 0 and out.dim(3, -4) == 0
    assert uq_series(out) == {(e, 0): 1 for e in range(16)}
    assert uq_series(out) == hopfss.uq_homology_oracle(p)


def test_random_instances_match_oracle():
    rng = random.Random(11)
    nonzero = 0
    for _ in range(120):
        p = hopfss.random_diff_barcode(rng)
        assert uq_series(page_homology(p)) == hopfss.uq_homology_oracle(p)
        nonzero += any(not m.is_zero() for m in p.d.values())
    assert nonzero >= 20


def test_page_zero_columns_are_free_modules():
    m = modlib.builtin("cp2-desusp")
    spec = hopfss.PageSpec(3, 12)
    V, _ = hopfss.build_V(m, 0, spec)
    for k in range(4):
        R = build_rs(m, k)
        for d in range(R.bottom(), spec.max_internal(k) + 1):
            assert V.dim(k, d) == R.dim(d)


def _e1_by_enumeration(m, K, T):
    """Multisets of indecomposable monomials; each is a polynomial generator."""
    W = 2 ** (K + 1) - 1
    gens = []
    for k in range(K + 1):
        R = build_rs(m, k)
        for d in range(R.bottom(), T - 2 ** k + 1):
            for L, g, j in R.basis(d):
                if not L or L[0] > 0:
                    gens.append((2 ** k, d))
    out = {(0, 0): 1}
    for w, d in gens:
        new = dict(out)
        for (w0, d0), c in out.items():
            e = 1
            while w0 + e * w <= W and (w0 + e * w) + (d0 + e * d) <= T:
                key = (w0 + e * w, d0 + e * d)
                new[key] = new.get(key, 0) + c
                e += 1
        out = new
    return out


@pytest.mark.parametrize("name", ["cp2-desusp", "rp:4", "sphere:0", "dual-hz:16"])
def test_e1_series_by_enumeration(name):
    m = modlib.builtin(name)
    spec = hopfss.PageSpec.for_module(m, 3, 12)
    page = hopfss.build_page(m, 0, spec)
    assert page.series() == _e1_by_enumeration(m, 3, spec.T)


@pytest.mark.parametrize("name", ["rp:4", "rp4-ext", "sphere:2"])
def test_unstable_collapse(name):
    m = modlib.builtin(name)
    run = hopfss.run_ss(m, 3, 14)
    for p in run.pages:
        assert all(r == 0 for r in p.differential_ranks().values())
    assert run.einf_series() == run.pages[0].series()


def test_cp2_pages():
    m = modlib.builtin("cp2-desusp")
    run = hopfss.run_ss(m, 2, 10)
    p0, p1 = run.pages[0], run.pages[1]
    assert p0.differential_ranks()[3] == 1
    assert p0.V.label(0, 3) == ["y"]
    assert p0.diff.d[3].apply(1) == 1
    assert p0.V.label(1, 2) == ["Q^1 x"]
    # page 2: Q^3 y survives d_1
    j = p1.V.label(1, 6).index("Q^3 y")
    assert p1.diff.d[6].apply(1 << j) == 0
    assert "Q^3 y" in run.einf.label(1, 6)


def test_columns_below_page_are_l():
    m = modlib.builtin("cp2-desusp")
    spec = hopfss.PageSpec(3, 12)
    for s in (1, 2, 3):
        V, _ = hopfss.build_V(m, s, spec)
        for k in range(s):
            for d in V.dims[k]:
                assert V.dim(k, d) == singer.l_subspace(m, k, d).dim


def _propagated(m, mono):
    # d(Q^I x) = sum_i Q^I Q^{i-1}(x Sq^i), from the normal form of the whole word
    L, g, k = mono
    upper = to_upper(L, g)
    out = set()
    for i in range(0, g - m.bottom() + 1):
        y = 1 << k if i == 0 else m.sq(i, g).apply(1 << k)
        for kk in range(m.dim(g - i)):
            if (y >> kk) & 1:
                for Ln in dl_adem_normalize(upper + (i - 1,), g - i):
                    out ^= {(Ln, g - i, kk)}
    return out


def test_differential_propagation():
    m = modlib.builtin("cp2-desusp")
    for s in (0, 1, 2):
        R, T = build_rs(m, s), build_rs(m, s + 1)
        for n in range(R.bottom(), 16):
            D = singer.d_matrix(m, s, n, 0)
            for j, mono in enumerate(R.basis(n)):
                assert D.apply(1 << j) == T.vector(_propagated(m, mono), n - 1)


@pytest.mark.parametrize("name", ["rp:3", "cp2-desusp", "dual-hz2r:16", "sphere:-1"])
def test_run_verifies_transitions(name):
    run = hopfss.run_ss(modlib.builtin(name), 3, 12)
    assert len(run.checks) == 4
    assert all(c.kernel_is_L and c.cokernel_is_next and c.homology_matches_next_page for c in run.checks)


def test_spec_clips_to_truncation():
    spec = hopfss.PageSpec.for_module(modlib.dual_hz(10), 3, 30)
    assert spec.T < 30 and spec.requested == 30


def test_bottom_below_minus_one_rejected():
    with pytest.raises(ValueError):
        hopfss.run_ss(modlib.sphere(-2), 2, 8)
