"""Exact linear algebra over GF(2).

Vectors are Python ints used as bit sets: bit ``j`` holds coordinate ``j``.
A matrix stores one such int per row, so row operations are single XORs.
Column ``j`` of a matrix is bit ``j`` of every row; "leftmost" means lowest
bit, and the pivot of an echelon row is its lowest set bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CompositeNonzero


def _low(v: int) -> int:
    return (v & -v).bit_length() - 1


def bits(v: int):
    """Yield the indices of the set bits of ``v`` in increasing order."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def vec(entries: Iterable[int]) -> int:
    """Pack a 0/1 sequence into a bit vector."""
    v = 0
    for j, e in enumerate(entries):
        if e & 1:
            v |= 1 << j
    return v


def unvec(v: int, n: int) -> list[int]:
    return [(v >> j) & 1 for j in range(n)]


class F2Matrix:
    """An immutable ``nrows x ncols`` matrix over GF(2), bit-packed by row."""

    __slots__ = ("nrows", "ncols", "rows", "__dict__")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int] | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative dimension")
        mask = (1 << ncols) - 1
        if rows is None:
            rows = (0,) * nrows
        else:
            rows = tuple(int(r) for r in rows)
            if len(rows) != nrows:
                raise ValueError(f"expected {nrows} rows, got {len(rows)}")
            if any(r & ~mask for r in rows):
                raise ValueError("row has bits beyond ncols")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "F2Matrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]], ncols: int | None = None) -> "F2Matrix":
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        return cls(len(entries), ncols, [vec(r) for r in entries])

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> "F2Matrix":
        """Build the matrix whose ``j``-th column is the bit vector ``columns[j]``."""
        rows = [0] * nrows
        for j, c in enumerate(columns):
            bit = 1 << j
            for i in bits(c):
                if i >= nrows:
                    raise ValueError("column has bits beyond nrows")
                rows[i] |= bit
        return cls(nrows, len(columns), rows)

    @cached_property
    def columns(self) -> tuple[int, ...]:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            bit = 1 << i
            for j in bits(r):
                cols[j] |= bit
        return tuple(cols)

    @property
    def T(self) -> "F2Matrix":
        return F2Matrix(self.ncols, self.nrows, self.columns)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def apply(self, v: int) -> int:
        """Multiply the column vector ``v`` (a bit set over columns)."""
        out = 0
        for j in bits(v):
            out ^= self.columns[j]
        return out

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return F2Matrix.from_columns([self.apply(c) for c in other.columns], self.nrows)

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return F2Matrix(self.nrows, self.ncols, [a ^ b for a, b in zip(self.rows, other.rows)])

    def is_zero(self) -> bool:
        return not any(self.rows)

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [unvec(r, self.ncols) for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self):
        body = "; ".join("".join(map(str, r)) for r in self.to_lists())
        return f"F2Matrix({self.nrows}x{self.ncols}: {body})"


def _rref_rows(rows: Iterable[int]) -> tuple[list[int], list[int]]:
    """Reduced echelon rows sorted by pivot, and their pivots."""
    piv: dict[int, int] = {}
    for r in rows:
        r = _reduce_by(piv, r)
        if r:
            p = _low(r)
            bit = 1 << p
            for q, row in piv.items():
                if row & bit:
                    piv[q] = row ^ r
            piv[p] = r
    pivots = sorted(piv)
    return [piv[p] for p in pivots], pivots


def _reduce_by(piv: dict[int, int], v: int) -> int:
    x = v
    while x:
        low = x & -x
        row = piv.get(low.bit_length() - 1)
        if row is not None:
            v ^= row
            x = v & ~((low << 1) - 1)
        else:
            x ^= low
    return v


def rref(m: F2Matrix) -> tuple[int, F2Matrix, list[int]]:
    """Reduced row-echelon form. Returns ``(rank, echelon, pivot_columns)``.

    The echelon matrix keeps the shape of ``m``; zero rows go to the bottom.
    """
    rows, pivots = _rref_rows(m.rows)
    rank = len(rows)
    echelon = F2Matrix(m.nrows, m.ncols, rows + [0] * (m.nrows - rank))
    return rank, echelon, pivots


def rank(m: F2Matrix) -> int:
    if m.nrows <= m.ncols:
        return len(_rref_rows(m.rows)[0])
    return len(_rref_rows(m.columns)[0])


class Subspace:
    """A subspace of GF(2)^n held as its canonical reduced echelon basis."""

    __slots__ = ("ambient_dim", "basis", "_piv")

    def __init__(self, ambient_dim: int, vectors: Iterable[int] = ()):
        rows, pivots = _rref_rows(vectors)
        mask = (1 << ambient_dim) - 1
        if any(r & ~mask for r in rows):
            raise ValueError("vector outside ambient space")
        self.ambient_dim = ambient_dim
        self.basis = tuple(rows)
        self._piv = dict(zip(pivots, rows))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, [1 << i for i in range(n)])

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> list[int]:
        return sorted(self._piv)

    def reduce(self, v: int) -> int:
        return _reduce_by(self._piv, v)

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def contains_space(self, other: "Subspace") -> bool:
        return all(v in self for v in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.ambient_dim, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        # kernel of [A; B]^T restricted to the A part
        n = self.dim
        stacked = F2Matrix.from_columns(list(self.basis) + list(other.basis), self.ambient_dim)
        ker, _ = kernel_image(stacked)
        out = []
        for k in ker.basis:
            w = 0
            for j in bits(k & ((1 << n) - 1)):
                w ^= self.basis[j]
            out.append(w)
        return Subspace(self.ambient_dim, out)

    def image(self, m: F2Matrix) -> "Subspace":
        return Subspace(m.nrows, [m.apply(v) for v in self.basis])

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        body = ", ".join("".join(map(str, unvec(v, self.ambient_dim))) for v in self.basis)
        return f"Subspace(dim {self.dim} in {self.ambient_dim}: [{body}])"


def kernel_image(m: F2Matrix) -> tuple[Subspace, Subspace]:
    """Kernel (in the domain, ``ncols``) and image (in the codomain, ``nrows``)."""
    rows, pivots = _rref_rows(m.rows)
    pivset = set(pivots)
    kernel = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        v = 1 << f
        fbit = 1 << f
        for r, p in zip(rows, pivots):
            if r & fbit:
                v |= 1 << p
        kernel.append(v)
    image = Subspace(m.nrows, m.columns)
    return Subspace(m.ncols, kernel), image


class Echelon:
    """Incremental echelon basis whose rows carry a tag of coefficients.

    ``reduce(v)`` returns the remainder of ``v`` together with the XOR of the
    tags of every row used, so tags can record how ``v`` decomposes.
    """

    __slots__ = ("_rows",)

    def __init__(self):
        self._rows: dict[int, tuple[int, int]] = {}

    def __len__(self):
        return len(self._rows)

    def reduce(self, v: int, tag: int = 0) -> tuple[int, int]:
        rows = self._rows
        x = v
        while x:
            low = x & -x
            entry = rows.get(low.bit_length() - 1)
            if entry is not None:
                v ^= entry[0]
                tag ^= entry[1]
                x = v & ~((low << 1) - 1)
            else:
                x ^= low
        return v, tag

    def add(self, v: int, tag: int = 0) -> int:
        """Insert ``v``; return its remainder (0 if already in the span)."""
        r, t = self.reduce(v, tag)
        if r:
            self._rows[_low(r)] = (r, t)
        return r


class Subquotient:
    """``sub / quot`` for subspaces ``quot <= sub`` of a common ambient space.

    Representatives are the basis vectors of ``sub`` reduced against
    ``quot`` and the earlier representatives, so they are canonical.
    """

    def __init__(self, sub: Subspace, quot: Subspace):
        if sub.ambient_dim != quot.ambient_dim:
            raise ValueError("ambient dimensions differ")
        if not sub.contains_space(quot):
            raise ValueError("quotient subspace is not contained in the subspace")
        self.sub = sub
        self.quot = quot
        ech = Echelon()
        for q in quot.basis:
            ech.add(q)
        reps = []
        for v in sub.basis:
            r, _ = ech.reduce(v)
            if r:
                ech.add(r, 1 << len(reps))
                reps.append(r)
        self._ech = ech
        self.reps: tuple[int, ...] = tuple(reps)

    @property
    def dim(self) -> int:
        return len(self.reps)

    @property
    def ambient_dim(self) -> int:
        return self.sub.ambient_dim

    def project(self, v: int) -> int:
        """Coordinates of the class of ``v`` in the representative basis."""
        r, tag = self._ech.reduce(v)
        if r:
            raise ValueError("vector is not in the subspace")
        return tag

    def lift(self, coords: int) -> int:
        out = 0
        for k in bits(coords):
            out ^= self.reps[k]
        return out

    def __contains__(self, v: int) -> bool:
        return self._ech.reduce(v)[0] == 0


@dataclass(frozen=True)
class Homology:
    """Homology of ``A -> B -> C`` at ``B``."""

    dim: int
    cycle_reps: tuple[int, ...]
    subquotient: Subquotient

    def projection(self, cycle: int) -> int:
        return self.subquotient.project(cycle)


def subquotient_homology(d_in: F2Matrix, d_out: F2Matrix) -> Homology:
    """Homology at the middle of ``A --d_in--> B --d_out--> C``.

    Raises :class:`CompositeNonzero` unless ``d_out @ d_in == 0``.
    """
    if d_in.nrows != d_out.ncols:
        raise ValueError("maps are not composable")
    if not (d_out @ d_in).is_zero():
        raise CompositeNonzero("d_out o d_in is nonzero")
    cycles, _ = kernel_image(d_out)
    boundaries = Subspace(d_in.nrows, d_in.columns)
    sq = Subquotient(cycles, boundaries)
    return Homology(sq.dim, sq.reps, sq)
