import itertools

import pytest

from destab import modlib
from destab.amodule import suspend
from destab.dlfree import (
    apply_q,
    build_rs,
    dl_adem_normalize,
    epsilon_matrix,
    format_monomial,
    is_admissible,
    lower_degree,
    lower_sequences,
    q0_matrix,
    to_upper,
)
from destab.errors import TruncationInsufficient
from destab.f2linalg import kernel_image
from oracles import dl_nf_by as nf_by, dl_upper_nf as upper_nf, dl_words
from destab.steenrod import adem


def test_q3q1_vanishes():
    assert dl_adem_normalize((3, 1), 1) == frozenset()


def test_small_normal_forms():
    # Q^4 Q^1 x = Q^3 Q^2 x for |x| = 1
    assert upper_nf((4, 1), 1) == {(3, 2)}
    assert dl_adem_normalize((2, 1), 1) == {(0, 0)}
    assert dl_adem_normalize((0,), 1) == frozenset()


@pytest.mark.parametrize("g", [-1, 0, 1, 2, 3])
def test_rewrite_order_independent(g):
    for w in dl_words(3, 24, g):
        ref = upper_nf(w, g)
        assert nf_by(w, g, lambda b: b[0]) == ref, (w, g)
        assert nf_by(w, g, lambda b: b[-1]) == ref, (w, g)


@pytest.mark.parametrize("g", [-1, 0, 1, 2])
def test_idempotent(g):
    for w in dl_words(3, 24, g):
        for L in dl_adem_normalize(w, g):
            assert is_admissible(L)
            assert dl_adem_normalize(to_upper(L, g), g) == {L}


def test_lower_sequences_brute():
    for s in range(4):
        for total in range(20):
            brute = [
                L for L in itertools.product(range(total + 1), repeat=s)
                if is_admissible(L) and sum(i * 2 ** k for k, i in enumerate(L)) == total
            ]
            assert sorted(lower_sequences(s, total)) == sorted(brute)


def test_degree_and_format():
    assert lower_degree((0, 1), 1) == 2 * (2 * 1 + 1) + 0
    assert to_upper((0, 1), 1) == (3, 2)
    assert format_monomial((0, 1), 1, "x") == "Q^3Q^2 x"
    assert format_monomial((), 1, "x") == "x"


def test_sphere_dims():
    R = build_rs(modlib.sphere(1), 1)
    assert [R.dim(n) for n in range(6)] == [0, 0, 1, 1, 1, 1]


def test_nishida_example():
    # (Q^2 x) Sq^1 = Q^1 x for |x| = 1, i.e. Q_1 x -> Q_0 x
    R = build_rs(modlib.sphere(1), 1)
    assert R.sq_mono(((1,), 1, 0), 1) == {((0,), 1, 0)}


FIXTURES = ["sphere:0", "sphere:1", "rp:4", "cp2-desusp", "rp4-ext"]


@pytest.mark.parametrize("name", FIXTURES)
def test_action_satisfies_adem(name):
    m = modlib.builtin(name)
    for s in (1, 2):
        R = build_rs(m, s)
        for n in range(R.bottom(), 18):
            for b in range(1, n - R.bottom() + 1):
                for a in range(1, 2 * b):
                    if n - a - b < R.bottom():
                        continue
                    lhs = R.sq(b, n - a) @ R.sq(a, n)
                    rhs = None
                    for w in adem(a, b):
                        mat = R.sq(w[0], n)
                        if len(w) == 2:
                            mat = R.sq(w[1], n - w[0]) @ mat
                        rhs = mat if rhs is None else rhs + mat
                    if rhs is None:
                        assert lhs.is_zero(), (name, s, n, a, b)
                    else:
                        assert lhs == rhs, (name, s, n, a, b)


@pytest.mark.parametrize("name", ["sphere:1", "rp:4", "rp4-ext"])
def test_unstable_input_gives_unstable_output(name):
    m = modlib.builtin(name)
    for s in (1, 2):
        R = build_rs(m, s)
        for n in range(max(R.bottom(), 0), 20):
            for i in range(n // 2 + 1, n + 1):
                if n - i >= R.bottom():
                    assert R.sq(i, n).is_zero()


@pytest.mark.parametrize("name", ["sphere:0", "rp:4", "cp2-desusp", "rp4-ext"])
def test_short_exact_sequence_maps(name):
    m = modlib.builtin(name)
    ms = suspend(m, 1)
    for s in (1, 2, 3):
        Rp, R, Rs = build_rs(m, s - 1), build_rs(m, s), build_rs(ms, s)
        for n in range(R.bottom(), 22):
            eps = epsilon_matrix(R, Rs, n)
            _, im_eps = kernel_image(eps)
            ker_eps, _ = kernel_image(eps)
            assert im_eps.dim == Rs.dim(n + 1)
            if n % 2 == 0 and n // 2 >= Rp.bottom():
                q0 = q0_matrix(Rp, R, n // 2)
                ker_q, im_q = kernel_image(q0)
                assert ker_q.dim == 0
                assert im_q == ker_eps
            else:
                assert ker_eps.dim == 0


def test_apply_q_prepends():
    m = modlib.builtin("cp2-desusp")
    R0 = build_rs(m, 0)
    v, n = apply_q(3, R0, 1 << 0, 3)
    R1 = build_rs(m, 1)
    assert n == 6 and R1.monomials(v, 6) == [((0,), 3, 0)]
    # below the degree gives zero
    assert apply_q(2, R0, 1, 3)[0] == 0


def test_truncation_bound():
    m = modlib.builtin("dual-steenrod:6")
    R = build_rs(m, 2)
    assert R.top == 4 * 7 - 1
    R.dim(R.top)
    with pytest.raises(TruncationInsufficient):
        R.dim(R.top + 1)
