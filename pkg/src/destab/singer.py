"""The Singer complex, derived functors of destabilization, and ``L_s``.

Grading.  For a module ``N`` the differential
``d_s: R_s(N) -> R_{s+1}(Sigma N)`` is

    d_s(Q^I x) = sum_{i >= 0} Q^I Q^{i-1} (sigma x Sq^i)

and preserves degree.  ``H_s(M)`` is the homology at ``R_s M`` of

    R_{s-1}(Sigma^-1 M) -> R_s M -> R_{s+1}(Sigma M),

so the s-th derived functor is ``Omega^infty_s N = Sigma H_s(Sigma^{s-1} N)``
and ``L_s M`` is a subspace of ``H_s(M)`` in the same degrees.

The same expansion without ``sigma`` (generator offset 0) is the page
differential ``R_s M_n -> R_{s+1} M_{n-1}`` of the spectral sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .amodule import FModule, suspend
from .dlfree import FreeDLModule, _xor_into, apply_upper, build_rs, epsilon_matrix, to_upper
from .errors import CompositeNonzero, NotACycle, RouteMismatch, TruncationInsufficient
from .f2linalg import F2Matrix, Homology, Subspace, bits, kernel_image, subquotient_homology


@lru_cache(maxsize=None)
def susp(m: FModule, k: int) -> FModule:
    """Cached suspension so repeated requests share one object and its caches."""
    if k == 0:
        return m
    return suspend(m, k)


def _min_top(*tops):
    known = [t for t in tops if t is not None]
    return min(known) if known else None


def differential_terms(N: FModule, mono: tuple, offset: int) -> set:
    """``sum_i Q^I Q^{i-1}(x Sq^i)`` on one monomial, generator shifted by ``offset``."""
    L, g, k = mono
    upper = to_upper(L, g)
    acc: set = set()
    lo = N.bottom()
    for i in range(0, g - lo + 1):
        y = 1 << k if i == 0 else N.sq(i, g).apply(1 << k)
        if not y:
            continue
        g2 = g - i + offset
        terms = apply_upper(i - 1, (), g2)
        for j in reversed(upper):
            nxt: set = set()
            for Lt in terms:
                _xor_into(nxt, apply_upper(j, Lt, g2))
            terms = nxt
            if not terms:
                break
        for Lt in terms:
            _xor_into(acc, [(Lt, g2, kk) for kk in bits(y)])
    return acc


@lru_cache(maxsize=None)
def d_matrix(N: FModule, s: int, n: int, offset: int = 1) -> F2Matrix:
    """Matrix of the differential out of ``R_s(N)`` in degree ``n``.

    ``offset=1`` is the Singer differential into ``R_{s+1}(Sigma N)_n``;
    ``offset=0`` is the page differential into ``R_{s+1}(N)_{n-1}``.
    """
    R = build_rs(N, s)
    T = build_rs(susp(N, offset), s + 1)
    tn = n - 1 + offset
    src = R.basis(n)
    if T.top is not None and tn > T.top:
        raise TruncationInsufficient(f"{T.name} is not determined in degree {tn}")
    cols = [T.vector(differential_terms(N, m, offset), tn) for m in src]
    return F2Matrix.from_columns(cols, T.dim(tn))


def homology_bound(P: FModule, s: int) -> int | None:
    """Largest degree in which ``H_s(P)`` is determined by the truncated input."""
    tops = [build_rs(P, s).top, build_rs(susp(P, 1), s + 1).top]
    if s > 0:
        tops.append(build_rs(susp(P, -1), s - 1).top)
    return _min_top(*tops)


@lru_cache(maxsize=None)
def homology(P: FModule, s: int, n: int) -> Homology:
    """``H_s(P)`` in degree ``n``, with canonical cycle representatives."""
    bound = homology_bound(P, s)
    if bound is not None and n > bound:
        raise TruncationInsufficient(
            f"H_{s}({P.name}) is only determined through degree {bound}, not {n}"
        )
    R = build_rs(P, s)
    d_out = d_matrix(P, s, n, 1)
    if s == 0:
        d_in = F2Matrix(R.dim(n), 0)
    else:
        d_in = d_matrix(susp(P, -1), s - 1, n, 1)
    return subquotient_homology(d_in, d_out)


def check_complex(N: FModule, s: int, n: int) -> None:
    """Raise :class:`CompositeNonzero` unless ``d_{s+1} d_s = 0`` out of ``R_s(N)_n``."""
    first = d_matrix(N, s, n, 1)
    second = d_matrix(susp(N, 1), s + 1, n, 1)
    if not (second @ first).is_zero():
        raise CompositeNonzero(f"d_{s + 1} d_{s} != 0 on R_{s}({N.name}) in degree {n}")


class SingerComplex:
    """``R_0 M -> R_1 M -> ...`` with ``R_s M = Sigma R_s(Sigma^{s-1} M)``.

    Stage degrees are total degrees: stage ``s`` in degree ``n`` is
    ``R_s(Sigma^{s-1} M)`` in degree ``n - 1``.
    """

    def __init__(self, m: FModule, max_s: int):
        self.base = m
        self.max_s = max_s

    def generator_module(self, s: int) -> FModule:
        return susp(self.base, s - 1)

    def stage(self, s: int) -> FreeDLModule:
        return build_rs(self.generator_module(s), s)

    def dim(self, s: int, n: int) -> int:
        return self.stage(s).dim(n - 1)

    def d(self, s: int, n: int) -> F2Matrix:
        return d_matrix(self.generator_module(s), s, n - 1, 1)

    def check(self, s: int, n: int) -> None:
        check_complex(self.generator_module(s), s, n - 1)


def d_s(m: FModule, s: int, degrees) -> dict[int, F2Matrix]:
    """Blocks of ``d_s: R_s(m) -> R_{s+1}(Sigma m)`` for the requested degrees."""
    return {n: d_matrix(m, s, n, 1) for n in degrees}


@dataclass
class DerivedResult:
    """``Omega^infty_s`` of a module, degree by degree."""

    module: FModule
    s: int
    max_degree: int
    parts: dict[int, Homology] = field(default_factory=dict)

    @property
    def generator_module(self) -> FModule:
        return susp(self.module, self.s - 1)

    def dim(self, d: int) -> int:
        h = self.parts.get(d)
        return h.dim if h else 0

    def dims(self) -> dict[int, int]:
        return {d: h.dim for d, h in self.parts.items() if h.dim}

    def reps(self, d: int) -> tuple[int, ...]:
        h = self.parts.get(d)
        return h.cycle_reps if h else ()

    def labels(self, d: int) -> list[str]:
        h = self.parts.get(d)
        if not h:
            return []
        labs = build_rs(self.generator_module, self.s).labels(d - 1)
        return ["+".join(labs[j] for j in bits(v)) for v in h.cycle_reps]


def _range_start(P: FModule, s: int) -> int:
    return build_rs(P, s).bottom()


def derived_functor(m: FModule, s: int, max_degree: int) -> DerivedResult:
    """``Omega^infty_s m`` in degrees ``<= max_degree`` via the Singer complex."""
    P = susp(m, s - 1)
    out = DerivedResult(m, s, max_degree)
    for n in range(_range_start(P, s), max_degree):
        out.parts[n + 1] = homology(P, s, n)
    return out


@dataclass
class LResult:
    """``L_s M`` as subspaces of ``H_s(M)``, with cycle representatives in ``R_s M``."""

    module: FModule
    s: int
    max_degree: int
    spaces: dict[int, Subspace] = field(default_factory=dict)

    def dim(self, d: int) -> int:
        sp = self.spaces.get(d)
        return sp.dim if sp else 0

    def dims(self) -> dict[int, int]:
        return {d: sp.dim for d, sp in self.spaces.items() if sp.dim}

    def reps(self, d: int) -> list[int]:
        sp = self.spaces.get(d)
        if not sp:
            return []
        h = homology(self.module, self.s, d)
        return [h.subquotient.lift(c) for c in sp.basis]

    def labels(self, d: int) -> list[str]:
        labs = build_rs(self.module, self.s).labels(d)
        return ["+".join(labs[j] for j in bits(v)) for v in self.reps(d)]


def _project(h: Homology, v: int, what: str) -> int:
    try:
        return h.projection(v)
    except ValueError:
        raise NotACycle(f"{what} is not a cycle") from None


def sq_on_homology(M: FModule, s: int, m: int, i: int) -> F2Matrix:
    """``Sq^i: H_s(M)_m -> H_s(M)_{m-i}`` in representative coordinates."""
    h = homology(M, s, m)
    R = build_rs(M, s)
    if m - i < R.bottom():
        return F2Matrix(0, h.dim)
    h2 = homology(M, s, m - i)
    mat = R.sq(i, m)
    cols = [_project(h2, mat.apply(z), f"Sq^{i} of a cycle in H_{s}") for z in h.cycle_reps]
    return F2Matrix.from_columns(cols, h2.dim)


def l_by_sq0(M: FModule, s: int, m: int) -> Subspace:
    """Route one: classes ``z`` with ``sq_0(Sigma z) = 0``.

    In odd degree ``m = 2n - 1`` that is ``[z Sq^n] = 0``; in even degree
    every class qualifies.
    """
    h = homology(M, s, m)
    if m % 2 == 0:
        return Subspace.full(h.dim)
    n = (m + 1) // 2
    return kernel_image(sq_on_homology(M, s, m, n))[0]


def epsilon_on_homology(M: FModule, s: int, m: int) -> F2Matrix:
    """``epsilon_*: H_s(Sigma^-1 M)_{m-1} -> H_s(M)_m`` in representative coordinates."""
    Pm = susp(M, -1)
    src = homology(Pm, s, m - 1)
    tgt = homology(M, s, m)
    E = epsilon_matrix(build_rs(Pm, s), build_rs(M, s), m - 1)
    cols = [_project(tgt, E.apply(z), "epsilon of a cycle") for z in src.cycle_reps]
    return F2Matrix.from_columns(cols, tgt.dim)


def l_by_epsilon(M: FModule, s: int, m: int) -> Subspace:
    """Route two: the image of ``epsilon_*``."""
    return kernel_image(epsilon_on_homology(M, s, m))[1]


def l_subspace(M: FModule, s: int, m: int) -> Subspace:
    """``L_s M`` in degree ``m``; both routes are computed and must agree."""
    a = l_by_sq0(M, s, m)
    b = l_by_epsilon(M, s, m)
    if a != b:
        raise RouteMismatch(
            f"L_{s}({M.name}) in degree {m}: kernel of sq_0 has dim {a.dim}, "
            f"image of epsilon_* has dim {b.dim}, and they differ"
        )
    return a


def l_bound(M: FModule, s: int) -> int | None:
    """Largest degree in which ``L_s M`` is determined."""
    shifted = homology_bound(susp(M, -1), s)
    return _min_top(homology_bound(M, s), None if shifted is None else shifted + 1)


def l_functor(M: FModule, s: int, max_degree: int) -> LResult:
    """``L_s M`` in degrees ``<= max_degree``."""
    out = LResult(M, s, max_degree)
    for m in range(build_rs(M, s).bottom(), max_degree + 1):
        sp = l_subspace(M, s, m)
        if sp.ambient_dim:
            out.spaces[m] = sp
    return out


def q_on_l(M: FModule, s: int, i: int, m: int, coords: int) -> tuple[int, int]:
    """``Q^i`` on the class with coordinates ``coords`` in ``H_s(M)_m``.

    Returns coordinates in ``H_{s+1}(M)_{m+i}`` and that degree.  The image
    of a representative is checked to be a cycle.
    """
    h = homology(M, s, m)
    z = h.subquotient.lift(coords)
    return q_on_cycle(M, s, i, m, z)


def q_on_cycle(M: FModule, s: int, i: int, m: int, z: int) -> tuple[int, int]:
    R = build_rs(M, s)
    R1 = build_rs(M, s + 1)
    acc: set = set()
    for L, g, k in R.monomials(z, m):
        _xor_into(acc, [(Ln, g, k) for Ln in apply_upper(i, L, g)])
    n = m + i
    if not acc:
        return 0, n
    v = R1.vector(acc, n)
    h1 = homology(M, s + 1, n)
    return _project(h1, v, f"Q^{i} of a cycle"), n


def q_matrix_on_l(M: FModule, s: int, i: int, m: int) -> F2Matrix:
    h = homology(M, s, m)
    h1 = homology(M, s + 1, m + i)
    cols = [q_on_l(M, s, i, m, 1 << j)[0] for j in range(h.dim)]
    return F2Matrix.from_columns(cols, h1.dim)


@dataclass
class LESReport:
    module: str
    slots_checked: int
    max_s: int
    max_degree: int

    def __str__(self):
        return (
            f"{self.module}: long exact sequence exact at {self.slots_checked} slots "
            f"(s <= {self.max_s}, degrees <= {self.max_degree})"
        )


class LESFailure(AssertionError):
    pass


def les_maps(M: FModule, s: int, m: int):
    """The three maps of the long exact sequence leaving level ``s`` around degree ``m``.

    With ``P = Sigma^{s-1} M``, ``B_s = H_s(P)`` and ``C_s = H_s(Sigma P)``:

        B_s[m] --eps--> C_s[m+1] --del--> Phi C_s [m] --q0--> B_{s+1}[m]

    where ``(Phi C)[m]`` is ``C[m/2]`` for even ``m`` and zero otherwise.
    """
    P = susp(M, s - 1)
    SP = susp(P, 1)
    B = homology(P, s, m)
    C = homology(SP, s, m + 1)
    eps = F2Matrix.from_columns(
        [_project(C, epsilon_matrix(build_rs(P, s), build_rs(SP, s), m).apply(z), "epsilon") for z in B.cycle_reps],
        C.dim,
    )
    if m % 2 == 0:
        Ch = homology(SP, s, m // 2)
        dl = F2Matrix.from_columns([connecting(P, s, m, z, Ch) for z in C.cycle_reps], Ch.dim)
        B1 = homology(SP, s + 1, m)
        q0 = F2Matrix.from_columns([q_on_cycle(SP, s, m // 2, m // 2, z)[0] for z in Ch.cycle_reps], B1.dim)
    else:
        Ch = None
        B1 = homology(SP, s + 1, m)
        dl = F2Matrix(0, C.dim)
        q0 = F2Matrix(B1.dim, 0)
    return eps, dl, q0


def connecting(P: FModule, s: int, m: int, z: int, target: Homology) -> int:
    """Snake map on a cycle ``z`` of ``R_s(Sigma P)_{m+1}``.

    Lift through epsilon by raising lower indices, apply ``d``, and read off
    ``a`` from ``d(lift) = Q_0 a``.
    """
    SP = susp(P, 1)
    R = build_rs(P, s)
    lift = 0
    for L, g, k in build_rs(SP, s).monomials(z, m + 1):
        lift ^= R.vector([(tuple(i + 1 for i in L), g - 1, k)], m)
    dz = d_matrix(P, s, m, 1).apply(lift)
    T = build_rs(SP, s + 1)
    Ra = build_rs(SP, s)
    a = 0
    for L, g, k in T.monomials(dz, m):
        if L[0] != 0:
            raise NotACycle("connecting map: d(lift) is not in the image of q_0")
        a ^= Ra.vector([(L[1:], g, k)], m // 2)
    return _project(target, a, "connecting map value")


def les_check(M: FModule, max_s: int, max_degree: int | None = None) -> LESReport:
    """Verify exactness of the long exact sequence at every slot in range.

    Without ``max_degree`` each level runs up to the last degree the
    truncated input determines.
    """
    slots = 0
    reached = None

    def exact(f: F2Matrix, g: F2Matrix, where: str):
        nonlocal slots
        if not (g @ f).is_zero():
            raise LESFailure(f"composite nonzero at {where}")
        ker, _ = kernel_image(g)
        _, im = kernel_image(f)
        if ker.dim != im.dim:
            raise LESFailure(f"not exact at {where}: ker {ker.dim}, im {im.dim}")
        slots += 1

    for s in range(max_s + 1):
        P = susp(M, s - 1)
        lo = build_rs(P, s).bottom() - 1
        m = lo
        while max_degree is None or m <= max_degree:
            try:
                eps, dl, q0 = les_maps(M, s, m)
                prev = les_maps(M, s - 1, m)[2] if s else F2Matrix(eps.ncols, 0)
                nxt = les_maps(M, s + 1, m)[0] if s < max_s else None
            except TruncationInsufficient:
                if max_degree is not None:
                    raise
                break
            exact(prev, eps, f"B_{s}[{m}]")
            exact(eps, dl, f"C_{s}[{m + 1}]")
            exact(dl, q0, f"Phi C_{s}[{m}]")
            if nxt is not None:
                exact(q0, nxt, f"B_{s + 1}[{m}]")
            m += 1
        reached = m - 1 if reached is None else min(reached, m - 1)
    return LESReport(M.name, slots, max_s, reached if max_degree is None else max_degree)
