"""End-to-end acceptance checks, one per criterion.

Each check prints a single ``PASS``/``FAIL`` line.  All comparisons are exact
equalities over F2.  Run directly with ``python tests/test_acceptance.py`` for
just the summary lines.
"""

import random
import sys

import pytest

from oracles import dl_nf_by, dl_upper_nf, dl_words, first, last, middle, sq_nf_by, sq_words

from destab import hopfss, modlib, singer
from destab.amodule import suspend, unstable_part
from destab.chart import ChartTable
from destab.dlfree import build_rs, dl_adem_normalize, is_admissible, to_upper
from destab.errors import TruncationInsufficient
from destab.f2linalg import Subspace
from destab.steenrod import adem_normalize_sq, is_admissible as sq_admissible

FIXTURES = ["sphere:0", "sphere:2", "sphere:-1", *modlib.FIXTURES]
UNSTABLE = ["rp:4", "rp4-ext", "sphere:1", "sphere:2", "sphere:3"]


def rewriting():
    n = 0
    for w in sq_words(3, 24):
        ref = adem_normalize_sq(w)
        assert sq_nf_by(w, last) == ref and sq_nf_by(w, middle) == ref, w
        assert all(sq_admissible(t) and adem_normalize_sq(t) == {t} for t in ref), w
        n += 1
    for g in range(-1, 4):
        for w in dl_words(3, 24, g):
            ref = dl_upper_nf(w, g)
            assert dl_nf_by(w, g, first) == ref and dl_nf_by(w, g, last) == ref, (w, g)
            for L in dl_adem_normalize(w, g):
                assert is_admissible(L) and dl_adem_normalize(to_upper(L, g), g) == {L}
            n += 1
    assert dl_adem_normalize((3, 1), 1) == frozenset()
    return f"{n} words, Q^3Q^1x = 0"


def ses_dimensions():
    n = 0
    for name in ["sphere:0", "sphere:3", "rp:4", "cp2-desusp", "rp4-ext"]:
        m = modlib.builtin(name)
        for s in range(1, 5):
            R, Rp, Rs = build_rs(m, s), build_rs(m, s - 1), build_rs(suspend(m, 1), s)
            for d in range(R.bottom() - 2, 25):
                doubled = Rp.dim(d // 2) if d % 2 == 0 else 0
                assert R.dim(d) == doubled + Rs.dim(d + 1), (name, s, d)
                n += 1
    return f"{n} (fixture, s, degree) triples"


def complex_property():
    n = 0
    for name in FIXTURES:
        m = modlib.builtin(name)
        for s in range(4):
            N = singer.susp(m, s - 1)
            for d in range(build_rs(N, s).bottom(), 21):
                try:
                    singer.check_complex(N, s, d)
                except TruncationInsufficient:
                    break
                n += 1
    return f"{n} blocks"


def h0_oracle():
    for name in FIXTURES:
        m = modlib.builtin(name)
        res = singer.derived_functor(m, 0, m.highest())
        sub, inc = unstable_part(m)
        for d in m.degrees():
            ours = Subspace(m.dim(d), list(res.reps(d)))
            theirs = Subspace(m.dim(d), list(inc.block(d).columns))
            assert ours == theirs, (name, d)
    return f"{len(FIXTURES)} fixtures"


def unstable_collapse():
    for name in UNSTABLE:
        m = modlib.builtin(name)
        for s in range(4):
            R = build_rs(m, s)
            L = singer.l_functor(m, s, 16)
            for d in range(R.bottom(), 17):
                assert L.dim(d) == R.dim(d), (name, s, d)
        run = hopfss.run_ss(m, 3, 16)
        assert all(r == 0 for p in run.pages for r in p.differential_ranks().values()), name
        assert run.einf_series() == run.pages[0].series(), name
    return f"{len(UNSTABLE)} modules"


def acyclicity():
    a = modlib.dual_steenrod(14)
    for n in (0, 1, 2):
        for s in (1, 2, 3):
            P = suspend(a, n)
            top = singer.homology_bound(singer.susp(P, s - 1), s)
            res = singer.derived_functor(P, s, top + 1)
            assert res.dims() == {}, (n, s, res.dims())
    return "A_* through 14, n in 0..2, s in 1..3"


def les_exactness():
    out = []
    for name, bound in [("rp:3", 20), ("cp2-desusp", 20), ("dual-steenrod:10", None)]:
        rep = singer.les_check(modlib.builtin(name), 2, bound)
        assert rep.slots_checked > 0
        out.append(f"{name}: {rep.slots_checked} slots")
    return ", ".join(out)


def _restrict(series, T):
    return {k: v for k, v in series.items() if v and sum(k) <= T}


def em_series():
    # x, y have weight 1; internal degree 0 for x and the suspended class y
    run = hopfss.run_ss(modlib.dual_hz(12), 3, 10)
    want = {(w, 0): 1 for w in range(11)}
    assert _restrict(run.einf_series(), 10) == want, "a"

    run = hopfss.run_ss(modlib.dual_hz2r(12), 3, 10)
    want = {(w, 0): 1 for w in range(11)}
    want.update({(w + 1, 1): 1 for w in range(9)})
    assert _restrict(run.einf_series(), 10) == want, "b"

    m = suspend(modlib.dual_hz2r(12), -1)
    run = hopfss.run_ss(m, 3, 8)
    assert run.spec.T >= 8
    assert _restrict(run.einf_series(), 8) == {(w, 0): 1 for w in range(9)}, "c"
    return "(a), (b), (c)"


def cp2_regression():
    m = modlib.builtin("cp2-desusp")
    run = hopfss.run_ss(m, 2, 12)
    p0, p1 = run.pages[:2]
    # page 1: y -> Q^1 x
    assert p0.V.label(0, 3) == ["y"] and p0.V.label(1, 2) == ["Q^1 x"]
    assert p0.diff.d[3].apply(1) == 1
    # page 2: d vanishes on Q^3 y
    j = p1.V.label(1, 6).index("Q^3 y")
    assert p1.diff.d[6].apply(1 << j) == 0
    # E^inf: Q^3 y is a primitive at column -2, outside the Q-span of L_0
    assert "Q^3 y" in run.einf.label(1, 6)
    h = singer.homology(m, 1, 6)
    q3y = h.projection(build_rs(m, 1).vector([((0,), 3, 0)], 6))
    assert q3y and q3y in singer.l_subspace(m, 1, 6)
    span = Subspace(h.dim, [singer.q_on_l(m, 0, 6 - g, g, v)[0]
                            for g in singer.l_functor(m, 0, 6).spaces
                            for v in singer.l_subspace(m, 0, g).basis])
    assert q3y not in span
    return "d^1 y = Q^1 x, d^2 Q^3 y = 0, Q^3 y in E^inf"


def figure_regression():
    run = hopfss.run_ss(modlib.builtin("rp4-ext"), 4, 8)
    p = run.pages[0]
    t = ChartTable.from_series(p.series(), p.V)
    col = {r: c for (s, r), c in t.entries.items() if s == -1}
    assert col == {2: 1, 3: 2, 4: 2, 5: 2, 6: 1}, col
    names = sorted(x for (s, _), ns in t.annotations.items() if s == -1 for x in ns)
    assert names == sorted([f"a{i}" for i in range(1, 5)] + [f"b{i}" for i in range(1, 5)]), names
    assert t.annotations[(-1, 6)] == ["b4"]
    bottoms = t.bottom_entries()
    for k in range(5):
        assert bottoms[-k] == (2 * k, 1), (k, bottoms[-k])
    return "column -1 and bottom row a1^k"


def page_transitions():
    for name in FIXTURES:
        run = hopfss.run_ss(modlib.builtin(name), 4, 20)
        assert [c.s for c in run.checks][:4] == [0, 1, 2, 3]
        for c in run.checks:
            assert c.kernel_is_L and c.cokernel_is_next and c.homology_matches_next_page, (name, c)
    rng = random.Random(20)
    live = 0
    for _ in range(50):
        p = hopfss.random_diff_barcode(rng, max_primitives=6, max_degree=12)
        assert hopfss.uq_series(hopfss.page_homology(p)) == hopfss.uq_homology_oracle(p)
        live += any(not m.is_zero() for m in p.d.values())
    return f"{len(FIXTURES)} fixtures, 50 random instances ({live} with d != 0)"


def l_routes():
    n = 0
    for name in FIXTURES:
        m = modlib.builtin(name)
        for s in range(4):
            top = singer.l_bound(m, s)
            top = 20 if top is None else min(top, 20)
            for d in range(build_rs(m, s).bottom(), top + 1):
                assert singer.l_by_sq0(m, s, d) == singer.l_by_epsilon(m, s, d), (name, s, d)
                n += 1
    return f"{n} (fixture, s, degree) triples"


CRITERIA = [
    (1, "rewriting soundness", rewriting),
    (2, "short exact sequence dimensions", ses_dimensions),
    (3, "d d = 0", complex_property),
    (4, "H_0 equals the unstable part", h0_oracle),
    (5, "unstable collapse", unstable_collapse),
    (6, "acyclicity of A_*", acyclicity),
    (7, "long exact sequence", les_exactness),
    (8, "Eilenberg-MacLane series", em_series),
    (9, "CP^2 regression", cp2_regression),
    (10, "RP^4 v Sigma RP^4 chart", figure_regression),
    (11, "page transitions and Hopf homology oracle", page_transitions),
    (12, "L-route agreement", l_routes),
]


def report(num, title, fn):
    try:
        detail = fn()
    except Exception as exc:
        return False, f"FAIL criterion {num:>2}: {title}: {type(exc).__name__}: {exc}"
    return True, f"PASS criterion {num:>2}: {title} ({detail})"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, line = report(num, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [report(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
