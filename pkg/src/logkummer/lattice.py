"""Exact integer linear algebra and finite abelian groups.

Everything here works with Python ints (arbitrary precision) and
``fractions.Fraction``; nothing touches floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterator, Sequence

Vector = tuple[int, ...]


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    rows: tuple[tuple[int, ...], ...]
    ncols: int

    def __init__(self, rows: Sequence[Sequence[int]], ncols: int | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m: int, n: int) -> IntMatrix:
        return cls([[0] * n for _ in range(m)], n)

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> IntMatrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> IntMatrix:
        return cls([[c[i] for c in columns] for i in range(nrows)], len(columns))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(self.columns(), self.nrows)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows],
            other.ncols,
        )

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for matrix with {self.ncols} columns")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix([[k * x for x in r] for r in self.rows], self.ncols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        # Bareiss fraction-free elimination
        n = self.nrows
        if n == 0:
            return 1
        m = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form.

    ``U_inv`` and ``V_inv`` are carried along because callers need them to
    read off image lattices and to map vectors into cokernel coordinates.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        k = min(self.D.shape)
        return [self.D[i, i] for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A: IntMatrix) -> SnfDecomposition:
    m, n = A.shape
    a = A.tolist()
    U = IntMatrix.identity(m).tolist()
    Ui = IntMatrix.identity(m).tolist()
    V = IntMatrix.identity(n).tolist()
    Vi = IntMatrix.identity(n).tolist()

    # Row ops act on a and U (left) and inversely on Ui (right);
    # column ops act on a and V (right) and inversely on Vi (left).
    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row_dst += k * row_src
        if k == 0:
            return
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]
        for r in Ui:
            r[src] -= k * r[dst]

    def neg_row(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_col(src, dst, k):  # col_dst += k * col_src
        if k == 0:
            return
        for r in a:
            r[dst] += k * r[src]
        for r in V:
            r[dst] += k * r[src]
        Vi[src] = [x - k * y for x, y in zip(Vi[src], Vi[dst])]

    for t in range(min(m, n)):
        while True:
            # pivot: smallest nonzero magnitude in the trailing block
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = a[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, pi, pj = best
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = a[i][t] // p
                add_row(t, i, -q)
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = a[t][j] // p
                add_col(t, j, -q)
                if a[t][j]:
                    dirty = True
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if t < m and a[t][t] < 0:
            neg_row(t)

    return SnfDecomposition(
        U=IntMatrix(U, m),
        D=IntMatrix(a, n),
        V=IntMatrix(V, n),
        U_inv=IntMatrix(Ui, m),
        V_inv=IntMatrix(Vi, n),
    )


def kernel_basis(A: IntMatrix) -> list[Vector]:
    """Basis of the integer kernel ``{x : A x = 0}``; it is saturated in Z^n."""
    snf = smith_normal_form(A)
    r = snf.rank
    return [snf.V.column(j) for j in range(r, A.ncols)]


def image_basis(A: IntMatrix) -> list[Vector]:
    """Basis of the lattice spanned by the columns of ``A``."""
    snf = smith_normal_form(A)
    diag = snf.diagonal
    return [
        tuple(d * x for x in snf.U_inv.column(i))
        for i, d in enumerate(diag)
        if d != 0
    ]


def solve_integer(A: IntMatrix, b: Sequence[int]) -> Vector | None:
    """An integer solution of ``A x = b``, or ``None`` if none exists."""
    snf = smith_normal_form(A)
    y = snf.U.apply(b)
    diag = snf.diagonal
    z = [0] * A.ncols
    for i, yi in enumerate(y):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if yi != 0:
                return None
        elif yi % d:
            return None
        else:
            z[i] = yi // d
    return snf.V.apply(z)


def rank(A: IntMatrix) -> int:
    return smith_normal_form(A).rank


def canonical_factors(orders: Sequence[int]) -> list[int]:
    """Invariant factors of the product of cyclic groups of the given orders.

    Orders equal to 0 (infinite cyclic) are not accepted here.
    """
    if any(o < 1 for o in orders):
        raise ValueError(f"cyclic orders must be >= 1, got {list(orders)}")
    snf = smith_normal_form(IntMatrix.diagonal(list(orders))) if orders else None
    if snf is None:
        return []
    return [d for d in snf.diagonal if d > 1]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z/d_1 x ... x Z/d_k with d_i | d_{i+1} and every d_i >= 2."""

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", factors)
        if any(d < 2 for d in factors):
            raise ValueError(f"invariant factors must be >= 2, got {list(factors)}")
        for d, e in zip(factors, factors[1:]):
            if e % d:
                raise ValueError(f"invariant factors must form a divisibility chain, got {list(factors)}")

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> FiniteAbelianGroup:
        return cls(tuple(canonical_factors(orders)))

    @classmethod
    def cyclic(cls, n: int) -> FiniteAbelianGroup:
        return cls((n,) if n > 1 else ())

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return reduce(lambda x, y: x * y, self.invariant_factors, 1)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def is_cyclic(self) -> bool:
        return self.ngens <= 1

    def __call__(self, coords: Sequence[int]) -> GroupElement:
        return GroupElement(self, tuple(coords))

    def zero(self) -> GroupElement:
        return GroupElement(self, (0,) * self.ngens)

    def gens(self) -> list[GroupElement]:
        return [
            GroupElement(self, tuple(int(i == j) for j in range(self.ngens)))
            for i in range(self.ngens)
        ]

    def elements(self) -> Iterator[GroupElement]:
        for coords in itertools.product(*(range(d) for d in self.invariant_factors)):
            yield GroupElement(self, coords)

    def quotient_by_multiples(self, n: int) -> tuple[FiniteAbelianGroup, callable]:
        """The group G/nG together with the projection G -> G/nG."""
        kept = [(i, gcd(d, n)) for i, d in enumerate(self.invariant_factors) if gcd(d, n) > 1]
        target = FiniteAbelianGroup(tuple(g for _, g in kept))

        def project(x: GroupElement) -> GroupElement:
            if x.parent != self:
                raise ValueError("element does not belong to this group")
            return target(tuple(x.coords[i] for i, _ in kept))

        return target, project

    def __str__(self):
        if not self.invariant_factors:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


@dataclass(frozen=True)
class GroupElement:
    parent: FiniteAbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        factors = self.parent.invariant_factors
        if len(self.coords) != len(factors):
            raise ValueError(
                f"element has {len(self.coords)} coordinates, group {self.parent} needs {len(factors)}"
            )
        object.__setattr__(self, "coords", tuple(int(c) % d for c, d in zip(self.coords, factors)))

    def _check(self, other: GroupElement):
        if not isinstance(other, GroupElement) or other.parent != self.parent:
            raise ValueError("elements belong to different groups")

    def __add__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.parent, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> GroupElement:
        return GroupElement(self.parent, tuple(-a for a in self.coords))

    def __sub__(self, other: GroupElement) -> GroupElement:
        return self + (-other)

    def __rmul__(self, k: int) -> GroupElement:
        return GroupElement(self.parent, tuple(k * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self):
        return "(" + ",".join(map(str, self.coords)) + ")"


def element_order(g: GroupElement) -> int:
    order = 1
    for c, d in zip(g.coords, g.parent.invariant_factors):
        order = lcm(order, d // gcd(c, d))
    return order


@dataclass(frozen=True)
class Cokernel:
    """Z^m / im(A): its torsion group, free rank, and the projection map."""

    group: FiniteAbelianGroup
    free_rank: int
    snf: SnfDecomposition = field(repr=False)

    def project(self, v: Sequence[int]) -> tuple[GroupElement, Vector]:
        """Image of ``v`` as (torsion coordinates, free coordinates)."""
        y = self.snf.U.apply(v)
        diag = self.snf.diagonal
        torsion, free = [], []
        for i, yi in enumerate(y):
            d = diag[i] if i < len(diag) else 0
            if d == 0:
                free.append(yi)
            elif d > 1:
                torsion.append(yi)
        return self.group(torsion), tuple(free)


def cokernel_map(A: IntMatrix) -> Cokernel:
    snf = smith_normal_form(A)
    diag = snf.diagonal
    factors = tuple(d for d in diag if d > 1)
    free_rank = A.nrows - snf.rank
    return Cokernel(FiniteAbelianGroup(factors), free_rank, snf)


def cokernel(A: IntMatrix) -> tuple[FiniteAbelianGroup, int]:
    c = cokernel_map(A)
    return c.group, c.free_rank


@dataclass(frozen=True, order=True)
class QmodZ:
    """An element of Q/Z, stored as its representative in [0, 1)."""

    value: Fraction

    def __init__(self, value: Fraction | int | str = 0, denominator: int | None = None):
        if denominator is not None:
            value = Fraction(value, denominator)
        value = Fraction(value)
        object.__setattr__(self, "value", value - (value.numerator // value.denominator))

    @classmethod
    def parse(cls, text: str) -> QmodZ:
        return cls(Fraction(text.strip()))

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    def __add__(self, other: QmodZ) -> QmodZ:
        return QmodZ(self.value + other.value)

    def __neg__(self) -> QmodZ:
        return QmodZ(-self.value)

    def __sub__(self, other: QmodZ) -> QmodZ:
        return QmodZ(self.value - other.value)

    def __rmul__(self, k: int) -> QmodZ:
        return QmodZ(k * self.value)

    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


def qmodz_order(q: QmodZ) -> int:
    return q.denominator
