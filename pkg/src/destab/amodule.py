"""Locally finite right modules over the Steenrod algebra.

The action lowers degree: ``|x Sq^i| = |x| - i`` and composition is read
left to right, ``x (Sq^a Sq^b) = (x Sq^a) Sq^b``.

Every module carries an authoritative bound ``top``: degrees above it are
unknown and queries there raise :class:`TruncationInsufficient`.  ``top``
of ``None`` means the module is complete.  Because the action lowers
degree, the part of a module in degrees ``<= D`` is a submodule, so
truncated answers in low degrees are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import steenrod
from .errors import NotUnstable, TruncationInsufficient, ValidationError
from .f2linalg import F2Matrix, Subquotient, Subspace, bits, kernel_image


def _min_top(*tops):
    known = [t for t in tops if t is not None]
    return min(known) if known else None


class GradedModule:
    """Interface shared by explicit and lazily built modules."""

    name: str = "M"
    top: int | None = None

    def dim(self, d: int) -> int:
        raise NotImplementedError

    def labels(self, d: int) -> list[str]:
        raise NotImplementedError

    def sq(self, i: int, d: int) -> F2Matrix:
        """Matrix of ``Sq^i`` from degree ``d`` to degree ``d - i``."""
        raise NotImplementedError

    def bottom(self) -> int:
        """A degree below which the module vanishes."""
        raise NotImplementedError

    def check_degree(self, d: int) -> None:
        if self.top is not None and d > self.top:
            raise TruncationInsufficient(
                f"degree {d} of {self.name} exceeds its authoritative bound {self.top}"
            )

    def act(self, v: int, i: int, d: int) -> int:
        """``v Sq^i`` for a vector ``v`` in degree ``d``."""
        if i == 0:
            return v
        return self.sq(i, d).apply(v)

    def act_word(self, v: int, word: Sequence[int], d: int) -> int:
        for i in word:
            if not v:
                return 0
            v = self.act(v, i, d)
            d -= i
        return v


class FModule(GradedModule):
    """An explicit module: finitely many basis elements, action by matrices.

    ``basis`` maps degree to an ordered tuple of labels; ``action`` maps
    ``(i, d)`` to the ``F2Matrix`` of ``Sq^i`` out of degree ``d``.  Missing
    blocks are zero.
    """

    def __init__(
        self,
        name: str,
        basis: Mapping[int, Sequence[str]],
        action: Mapping[tuple[int, int], F2Matrix] | None = None,
        top: int | None = None,
    ):
        self.name = name
        self.top = top
        self._basis = {d: tuple(ls) for d, ls in sorted(basis.items()) if len(ls)}
        if top is not None and any(d > top for d in self._basis):
            raise ValidationError(f"{name}: basis element above max_degree {top}")
        self._act: dict[tuple[int, int], F2Matrix] = {}
        for (i, d), mat in (action or {}).items():
            if i < 1:
                raise ValidationError(f"{name}: action of Sq^{i} must have i >= 1")
            if mat.shape != (self.dim(d - i), self.dim(d)):
                raise ValidationError(
                    f"{name}: Sq^{i} block at degree {d} has shape {mat.shape}, "
                    f"expected {(self.dim(d - i), self.dim(d))}"
                )
            if not mat.is_zero():
                self._act[(i, d)] = mat

    @classmethod
    def from_actions(
        cls,
        name: str,
        generators: Sequence[tuple[str, int]],
        actions: Iterable[tuple[int, str, Iterable[str]]] = (),
        top: int | None = None,
    ) -> "FModule":
        """Build from ``(label, degree)`` pairs and ``(i, on, [targets])`` lines."""
        basis: dict[int, list[str]] = {}
        where: dict[str, tuple[int, int]] = {}
        for label, d in generators:
            if label in where:
                raise ValidationError(f"{name}: duplicate generator id {label!r}")
            basis.setdefault(d, [])
            where[label] = (d, len(basis[d]))
            basis[d].append(label)
        cols: dict[tuple[int, int], dict[int, int]] = {}
        for i, on, value in actions:
            if on not in where:
                raise ValidationError(f"{name}: action on unknown id {on!r}")
            d, j = where[on]
            v = 0
            for t in value:
                if t not in where:
                    raise ValidationError(f"{name}: action value names unknown id {t!r}")
                td, tj = where[t]
                if td != d - i:
                    raise ValidationError(
                        f"{name}: {on} Sq^{i} has degree {d - i} but {t} has degree {td}"
                    )
                v ^= 1 << tj
            block = cols.setdefault((i, d), {})
            block[j] = block.get(j, 0) ^ v
        action = {}
        for (i, d), block in cols.items():
            n = len(basis[d])
            action[(i, d)] = F2Matrix.from_columns(
                [block.get(j, 0) for j in range(n)], len(basis.get(d - i, ()))
            )
        return cls(name, basis, action, top)

    def dim(self, d: int) -> int:
        return len(self._basis.get(d, ()))

    def labels(self, d: int) -> list[str]:
        return list(self._basis.get(d, ()))

    def degrees(self) -> list[int]:
        return list(self._basis)

    def bottom(self) -> int:
        return min(self._basis) if self._basis else 0

    def highest(self) -> int | None:
        return max(self._basis) if self._basis else None

    def total_dim(self) -> int:
        return sum(len(v) for v in self._basis.values())

    def sq(self, i: int, d: int) -> F2Matrix:
        self.check_degree(d)
        if i == 0:
            return F2Matrix.identity(self.dim(d))
        mat = self._act.get((i, d))
        if mat is None:
            return F2Matrix.zeros(self.dim(d - i), self.dim(d))
        return mat

    def action_blocks(self) -> dict[tuple[int, int], F2Matrix]:
        return dict(self._act)

    def max_operation(self) -> int:
        return max((i for i, _ in self._act), default=0)

    def generators(self) -> list[tuple[str, int]]:
        return [(lab, d) for d, ls in self._basis.items() for lab in ls]

    def actions(self) -> list[tuple[int, str, list[str]]]:
        """Nonzero ``(i, on, [targets])`` lines in a canonical order."""
        out = []
        for d, ls in self._basis.items():
            for j, lab in enumerate(ls):
                for i in range(1, d - self.bottom() + 1):
                    mat = self._act.get((i, d))
                    if mat is None:
                        continue
                    col = mat.columns[j]
                    if col:
                        tl = self._basis[d - i]
                        out.append((i, lab, [tl[k] for k in bits(col)]))
        return out

    def renamed(self, name: str) -> "FModule":
        return FModule(name, self._basis, self._act, self.top)

    def with_top(self, top: int | None) -> "FModule":
        return FModule(self.name, self._basis, self._act, top)

    def __eq__(self, other):
        if not isinstance(other, FModule):
            return NotImplemented
        return (
            self.top == other.top
            and self._basis == other._basis
            and self._act == other._act
        )

    def __hash__(self):
        return hash((self.top, tuple(self._basis.items())))

    def __repr__(self):
        dims = ", ".join(f"{d}:{len(v)}" for d, v in self._basis.items())
        return f"FModule({self.name!r}, top={self.top}, dims {{{dims}}})"


@dataclass
class GradedMap:
    """A degreewise linear map ``source_d -> target_{d + shift}``."""

    source: GradedModule
    target: GradedModule
    shift: int
    blocks: dict[int, F2Matrix] = field(default_factory=dict)

    def block(self, d: int) -> F2Matrix:
        mat = self.blocks.get(d)
        if mat is None:
            return F2Matrix.zeros(self.target.dim(d + self.shift), self.source.dim(d))
        return mat

    def rank(self, d: int) -> int:
        _, im = kernel_image(self.block(d))
        return im.dim


@dataclass
class ValidationReport:
    name: str
    relations_checked: int
    degrees: tuple[int, int] | None

    def __str__(self):
        if self.degrees is None:
            return f"{self.name}: empty module, valid"
        lo, hi = self.degrees
        return f"{self.name}: valid ({self.relations_checked} Adem relations checked in degrees {lo}..{hi})"


def validate(m: FModule) -> ValidationReport:
    """Check every Adem relation ``Sq^a Sq^b``, ``a < 2b``, on every basis element."""
    if not m.degrees():
        return ValidationReport(m.name, 0, None)
    lo = m.bottom()
    count = 0
    for d in m.degrees():
        labels = m.labels(d)
        span = d - lo
        for b in range(1, span + 1):
            for a in range(1, min(2 * b, span - b + 1)):
                rel = steenrod.adem(a, b)
                for j, lab in enumerate(labels):
                    x = 1 << j
                    lhs = m.act(m.act(x, a, d), b, d - a)
                    rhs = 0
                    for w in rel:
                        rhs ^= m.act_word(x, w, d)
                    count += 1
                    if lhs != rhs:
                        raise ValidationError(
                            f"{m.name}: relation Sq^{a}Sq^{b} = {steenrod.format_sum(rel)} "
                            f"fails on {lab} (degree {d})"
                        )
    return ValidationReport(m.name, count, (lo, m.highest()))


def suspend(m: FModule, k: int) -> FModule:
    if k == 0:
        return m
    basis = {d + k: ls for d, ls in m._basis.items()}
    action = {(i, d + k): mat for (i, d), mat in m._act.items()}
    top = None if m.top is None else m.top + k
    return FModule(_suspended_name(m.name, k), basis, action, top)


def _suspended_name(name: str, k: int) -> str:
    return f"S^{k}({name})"


def phi(m: FModule) -> FModule:
    """The doubling functor: ``Phi(M)_{2n} = M_n`` and ``phi(x)Sq^{2i} = phi(xSq^i)``.

    The bound becomes ``2D + 1`` since degree ``2D + 1`` is odd, hence zero.
    """
    basis = {2 * d: [f"phi({lab})" for lab in ls] for d, ls in m._basis.items()}
    action = {(2 * i, 2 * d): mat for (i, d), mat in m._act.items()}
    top = None if m.top is None else 2 * m.top + 1
    return FModule(f"Phi({m.name})", basis, action, top)


def sq0(m: FModule) -> GradedMap:
    """``sq_0: M -> Phi(M)``, ``x -> phi(x Sq^n)`` on ``M_{2n}``, zero in odd degrees."""
    target = phi(m)
    blocks = {}
    for d in m.degrees():
        if d % 2 == 0 and d // 2 >= m.bottom():
            n = d // 2
            mat = m.sq(n, d)
            if not mat.is_zero():
                blocks[d] = mat
    return GradedMap(m, target, 0, blocks)


def unstable_condition(m: GradedModule, d: int) -> Subspace:
    """Vectors in degree ``d`` with ``x Sq^i = 0`` for every ``2i > d``."""
    n = m.dim(d)
    space = Subspace.full(n)
    for i in range(max(0, d // 2 + 1), d - m.bottom() + 1):
        ker, _ = kernel_image(m.sq(i, d))
        space = space.intersect(ker)
        if not space.dim:
            break
    return space


def preimage(mat: F2Matrix, target: Subspace) -> Subspace:
    cols = [target.reduce(c) for c in mat.columns]
    ker, _ = kernel_image(F2Matrix.from_columns(cols, mat.nrows))
    return ker


def unstable_part(m: FModule) -> tuple[FModule, GradedMap]:
    """The largest unstable submodule ``Omega^infty M`` and its inclusion.

    Start from the pointwise unstable condition and intersect with preimages
    under every ``Sq^i`` until nothing changes.
    """
    degs = m.degrees()
    spaces = {d: unstable_condition(m, d) for d in degs}
    lo = m.bottom()
    changed = True
    while changed:
        changed = False
        for d in degs:
            cur = spaces[d]
            if not cur.dim:
                continue
            for i in range(1, d - lo + 1):
                tgt = spaces.get(d - i)
                if tgt is None:
                    continue
                new = cur.intersect(preimage(m.sq(i, d), tgt))
                if new.dim != cur.dim:
                    cur = new
                    changed = True
            spaces[d] = cur
    return submodule(m, spaces, f"Oinf({m.name})")


def submodule(m: FModule, spaces: Mapping[int, Subspace], name: str) -> tuple[FModule, GradedMap]:
    """The submodule spanned degreewise by ``spaces`` (assumed closed), with inclusion."""
    basis = {}
    coords = {}
    for d, sp in spaces.items():
        if sp.dim:
            basis[d] = [_combo_label(m.labels(d), v) for v in sp.basis]
            coords[d] = Subquotient(sp, Subspace(sp.ambient_dim))
    action = {}
    for d in basis:
        for i in range(1, d - m.bottom() + 1):
            if d - i not in basis:
                continue
            mat = m.sq(i, d)
            if mat.is_zero():
                continue
            cols = []
            for v in spaces[d].basis:
                w = mat.apply(v)
                try:
                    cols.append(coords[d - i].project(w))
                except ValueError:
                    raise ValidationError(f"{name}: subspace is not closed under Sq^{i}") from None
            action[(i, d)] = F2Matrix.from_columns(cols, len(basis[d - i]))
        for i in range(1, d - m.bottom() + 1):
            if d - i in basis:
                continue
            if any(m.sq(i, d).apply(v) for v in spaces[d].basis):
                raise ValidationError(f"{name}: subspace is not closed under Sq^{i}")
    sub = FModule(name, basis, action, m.top)
    blocks = {
        d: F2Matrix.from_columns(list(spaces[d].basis), m.dim(d)) for d in basis
    }
    return sub, GradedMap(sub, m, 0, blocks)


def quotient(m: FModule, spaces: Mapping[int, Subspace], name: str) -> FModule:
    """``M / N`` for a submodule given degreewise by ``spaces``."""
    sqs = {}
    basis = {}
    for d in m.degrees():
        sp = spaces.get(d, Subspace(m.dim(d)))
        sq = Subquotient(Subspace.full(m.dim(d)), sp)
        sqs[d] = sq
        if sq.dim:
            basis[d] = [f"[{_combo_label(m.labels(d), v)}]" for v in sq.reps]
    action = {}
    for d in basis:
        for i in range(1, d - m.bottom() + 1):
            if d - i not in basis:
                continue
            mat = m.sq(i, d)
            cols = [sqs[d - i].project(mat.apply(v)) for v in sqs[d].reps]
            action[(i, d)] = F2Matrix.from_columns(cols, len(basis[d - i]))
    return FModule(name, basis, action, m.top)


def _combo_label(labels: Sequence[str], v: int) -> str:
    return "+".join(labels[j] for j in bits(v))


def is_unstable(m: FModule) -> bool:
    sub, _ = unstable_part(m)
    return sub.total_dim() == m.total_dim()


def _require_unstable(m: FModule) -> None:
    if not is_unstable(m):
        raise NotUnstable(f"{m.name} is not unstable")


def omega(m: FModule) -> FModule:
    """Loops on an unstable module: ``Sigma Omega M = ker(sq_0)``."""
    _require_unstable(m)
    s = sq0(m)
    spaces = {d: kernel_image(s.block(d))[0] for d in m.degrees()}
    ker, _ = submodule(m, spaces, "ker")
    return suspend(ker, -1).renamed(f"Omega({m.name})")


def omega1(m: FModule) -> FModule:
    """``Sigma Omega_1 M = coker(sq_0: M -> Phi M)``."""
    _require_unstable(m)
    s = sq0(m)
    target = s.target
    spaces = {}
    for d in target.degrees():
        if m.top is not None and d > m.top:
            continue
        spaces[d] = kernel_image(s.block(d))[1]
    cut = _truncate(target, m.top)
    coker = quotient(cut, spaces, "coker")
    return suspend(coker, -1).renamed(f"Omega1({m.name})")


def _truncate(m: FModule, top: int | None) -> FModule:
    if top is None:
        return m
    basis = {d: ls for d, ls in m._basis.items() if d <= top}
    action = {(i, d): mat for (i, d), mat in m._act.items() if d <= top}
    bound = top if m.top is None else min(top, m.top)
    return FModule(m.name, basis, action, bound)


def truncate(m: FModule, top: int) -> FModule:
    """The submodule of degrees ``<= top``, authoritative up to ``top``."""
    return _truncate(m, top)


def direct_sum(a: FModule, b: FModule, name: str | None = None) -> FModule:
    gens = a.generators() + b.generators()
    if len({g for g, _ in gens}) != len(gens):
        raise ValidationError("direct sum summands share generator ids")
    actions = a.actions() + b.actions()
    return FModule.from_actions(name or f"{a.name}+{b.name}", gens, actions, _min_top(a.top, b.top))


def relabel(m: FModule, fn) -> FModule:
    basis = {d: [fn(lab) for lab in ls] for d, ls in m._basis.items()}
    return FModule(m.name, basis, m._act, m.top)
