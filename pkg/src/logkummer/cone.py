"""Rational polyhedral cones in small dimension.

Converts generator descriptions to inequality descriptions by
Fourier-Motzkin elimination and back by enumerating tight row subsets.
Everything is exact; dimensions above ``MAX_CONE_RANK`` are refused.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

from .lattice import IntMatrix, Vector, kernel_basis, rank

MAX_CONE_RANK = 4


class CapabilityError(ValueError):
    """Raised when an exact procedure is asked to run above its rank cap."""


def primitive(row: Sequence) -> Vector:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in row]
    den = reduce(lambda a, b: a * b // gcd(a, b), (f.denominator for f in fr), 1)
    ints = [int(f * den) for f in fr]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class HCone:
    """``{x : E x = 0, A x >= 0}``; rows are primitive integer vectors."""

    dim: int
    equalities: tuple[Vector, ...]
    inequalities: tuple[Vector, ...]

    def contains(self, x: Sequence[int]) -> bool:
        return all(dot(e, x) == 0 for e in self.equalities) and all(
            dot(a, x) >= 0 for a in self.inequalities
        )

    def in_span(self, x: Sequence[int]) -> bool:
        return all(dot(e, x) == 0 for e in self.equalities)

    def lineality_basis(self) -> list[Vector]:
        rows = list(self.equalities) + list(self.inequalities)
        if not rows:
            return [tuple(int(i == j) for j in range(self.dim)) for i in range(self.dim)]
        return kernel_basis(IntMatrix(rows, self.dim))

    def is_pointed(self) -> bool:
        return not self.lineality_basis()

    def positive_functional(self) -> Vector:
        """Sum of the facet normals: zero on the lineality space, and >= 1
        on every integral cone point outside it."""
        return tuple(sum(col) for col in zip(*self.inequalities)) if self.inequalities else (0,) * self.dim


def _fm_eliminate(rows: list[tuple[list[Fraction], frozenset]], col: int, nelim: int):
    zero, pos, neg = [], [], []
    for r in rows:
        c = r[0][col]
        (pos if c > 0 else neg if c < 0 else zero).append(r)
    out = list(zero)
    for (p, hp), (q, hq) in itertools.product(pos, neg):
        hist = hp | hq
        # Kohler's rule: a combination of more than nelim + 1 originals is redundant
        if len(hist) > nelim + 1:
            continue
        a, b = p[col], -q[col]
        out.append(([b * x + a * y for x, y in zip(p, q)], hist))
    seen, dedup = set(), []
    for r, h in out:
        key = primitive(r)
        if not any(key):
            continue
        if key not in seen:
            seen.add(key)
            dedup.append(([Fraction(x) for x in key], h))
    return dedup


def cone_from_generators(generators: Sequence[Sequence[int]], dim: int) -> HCone:
    """Inequality description of the cone spanned by ``generators``."""
    if dim > MAX_CONE_RANK:
        raise CapabilityError(f"exact cone computations are capped at rank {MAX_CONE_RANK}, got {dim}")
    gens = [tuple(g) for g in generators if any(g)]
    m = len(gens)
    if m == 0:
        eqs = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
        return HCone(dim, tuple(eqs), ())

    # Variables: lambda_1..lambda_m then x_1..x_dim.
    # Equalities sum_j g_j lambda_j - x = 0, solved for pivot lambdas.
    eq = [[Fraction(gens[j][i]) for j in range(m)] + [Fraction(-int(i == k)) for k in range(dim)] for i in range(dim)]
    pivots = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, dim) if eq[i][c] != 0), None)
        if p is None:
            continue
        eq[r], eq[p] = eq[p], eq[r]
        piv = eq[r][c]
        eq[r] = [x / piv for x in eq[r]]
        for i in range(dim):
            if i != r and eq[i][c] != 0:
                f = eq[i][c]
                eq[i] = [x - f * y for x, y in zip(eq[i], eq[r])]
        pivots.append(c)
        r += 1
    span_eqs = [row[m:] for row in eq[r:]]

    # lambda_pivot = -sum(free coeffs * lambda_free) - (x part); substitute into lambda >= 0
    ineqs = []
    for k, c in enumerate(pivots):
        row = [-x for x in eq[k]]
        row[c] = Fraction(0)
        ineqs.append((row, frozenset([c])))
    for c in range(m):
        if c not in pivots:
            ineqs.append(([Fraction(int(j == c)) for j in range(m)] + [Fraction(0)] * dim, frozenset([c])))

    free = [c for c in range(m) if c not in pivots]
    for step, c in enumerate(free, start=1):
        ineqs = _fm_eliminate(ineqs, c, step)

    equalities = []
    for e in span_eqs:
        v = primitive(e)
        if any(v):
            equalities.append(v)
    if equalities:
        equalities = [primitive(row) for row in _row_basis(equalities)]
    candidates = []
    for row, _ in ineqs:
        v = primitive(row[m:])
        if any(v):
            candidates.append(v)
    return HCone(dim, tuple(equalities), tuple(_prune_facets(candidates, gens)))


def _row_basis(rows: list[Vector]) -> list[list[Fraction]]:
    mat = [[Fraction(x) for x in r] for r in rows]
    out = []
    for r in mat:
        for b in out:
            piv = next(i for i, x in enumerate(b) if x != 0)
            if r[piv] != 0:
                f = r[piv] / b[piv]
                r = [x - f * y for x, y in zip(r, b)]
        if any(r):
            out.append(r)
    return out


def _prune_facets(candidates: list[Vector], gens: list[Vector]) -> list[Vector]:
    """Keep one inequality per facet: those whose set of tight generators is
    maximal among the proper faces they cut out."""
    tight = {}
    for v in candidates:
        t = frozenset(j for j, g in enumerate(gens) if dot(v, g) == 0)
        if len(t) == len(gens):
            continue  # vanishes on the whole cone: implied by the span equalities
        tight.setdefault(t, v)
    faces = list(tight)
    keep = [t for t in faces if not any(t < s for s in faces)]
    return sorted(tight[t] for t in keep)


def rays_of(cone: HCone) -> tuple[list[Vector], list[Vector]]:
    """Extreme rays (modulo lineality) and a lineality basis of an H-cone."""
    dim = cone.dim
    if dim > MAX_CONE_RANK:
        raise CapabilityError(f"exact cone computations are capped at rank {MAX_CONE_RANK}, got {dim}")
    lin = cone.lineality_basis()
    E = list(cone.equalities)
    A = list(cone.inequalities)
    full_rank = dim - len(lin)
    eq_rank = rank(IntMatrix(E, dim)) if E else 0
    need = full_rank - 1 - eq_rank
    if full_rank == 0:
        return [], lin
    rays: dict[frozenset, Vector] = {}
    if need < 0:
        return [], lin
    for S in itertools.combinations(range(len(A)), need):
        rows = E + [A[i] for i in S]
        if rows and rank(IntMatrix(rows, dim)) != full_rank - 1:
            continue
        kb = kernel_basis(IntMatrix(rows, dim)) if rows else [
            tuple(int(i == j) for j in range(dim)) for i in range(dim)
        ]
        r = next((v for v in kb if any(dot(a, v) for a in A)), None)
        if r is None:
            continue
        vals = [dot(a, r) for a in A]
        if all(v >= 0 for v in vals):
            ray = r
        elif all(v <= 0 for v in vals):
            ray = tuple(-x for x in r)
        else:
            continue
        key = frozenset(i for i, a in enumerate(A) if dot(a, ray) == 0)
        rays.setdefault(key, primitive(ray))
    return sorted(rays.values()), lin
