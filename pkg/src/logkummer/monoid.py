"""Affine fs monoids and morphisms between them.

A monoid is given by finitely many generators in Z^d; it is the set of
their nonnegative integer combinations. The monoid law is written
additively throughout, so a multiplicative power a^n reads ``n * a``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import floor, ceil
from typing import Any, Sequence

from .cone import CapabilityError, HCone, cone_from_generators, dot, rays_of
from .lattice import (
    Cokernel,
    IntMatrix,
    Vector,
    cokernel_map,
    image_basis,
    kernel_basis,
    smith_normal_form,
    solve_integer,
)

MAX_HILBERT_RANK = 3
SEARCH_NODE_LIMIT = 200_000


class Status(enum.Enum):
    VERIFIED = "verified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class MorphismVerdict:
    status: Status
    witness: Any = None
    bound: int | None = None
    detail: str = ""

    @classmethod
    def verified(cls, witness=None, detail=""):
        return cls(Status.VERIFIED, witness, None, detail)

    @classmethod
    def refuted(cls, witness, detail=""):
        return cls(Status.REFUTED, witness, None, detail)

    @classmethod
    def inconclusive(cls, bound, detail=""):
        return cls(Status.INCONCLUSIVE, None, bound, detail)

    def __bool__(self):
        return self.status is Status.VERIFIED

    @property
    def refuted_(self) -> bool:
        return self.status is Status.REFUTED


class LatticeMembership:
    """Precomputed membership test for the lattice spanned by some vectors."""

    def __init__(self, vectors: Sequence[Sequence[int]], dim: int):
        self.dim = dim
        vecs = [tuple(v) for v in vectors if any(v)]
        if not vecs:
            self._snf = None
            return
        self._A = IntMatrix.from_columns(vecs, dim)
        self._snf = smith_normal_form(self._A)
        self._diag = self._snf.diagonal

    def __contains__(self, v: Sequence[int]) -> bool:
        if self._snf is None:
            return not any(v)
        y = self._snf.U.apply(v)
        for i, yi in enumerate(y):
            d = self._diag[i] if i < len(self._diag) else 0
            if (d == 0 and yi != 0) or (d != 0 and yi % d):
                return False
        return True


@dataclass(frozen=True)
class AffineMonoid:
    ambient_rank: int
    generators: tuple[Vector, ...]

    def __init__(self, generators: Sequence[Sequence[int]], ambient_rank: int | None = None):
        gens = [tuple(int(x) for x in g) for g in generators]
        if ambient_rank is None:
            if not gens:
                raise ValueError("ambient_rank is required for a monoid without generators")
            ambient_rank = len(gens[0])
        if any(len(g) != ambient_rank for g in gens):
            raise ValueError(f"every generator must lie in Z^{ambient_rank}")
        nonzero = sorted(set(g for g in gens if any(g)))
        object.__setattr__(self, "ambient_rank", ambient_rank)
        object.__setattr__(self, "generators", tuple(nonzero))

    @classmethod
    def free(cls, r: int) -> AffineMonoid:
        """N^r inside Z^r."""
        return cls([tuple(int(i == j) for j in range(r)) for i in range(r)], r)

    def __str__(self):
        return "<" + ", ".join(str(g if len(g) > 1 else g[0]) for g in self.generators) + ">"

    # cached_property needs an instance __dict__; frozen dataclasses keep one
    @cached_property
    def cone(self) -> HCone:
        return cone_from_generators(self.generators, self.ambient_rank)

    @cached_property
    def gp_basis(self) -> list[Vector]:
        if not self.generators:
            return []
        return image_basis(IntMatrix.from_columns(self.generators, self.ambient_rank))

    @cached_property
    def gp_membership(self) -> LatticeMembership:
        return LatticeMembership(self.generators, self.ambient_rank)

    @property
    def rank(self) -> int:
        return len(self.gp_basis)

    def gp_coordinates(self, x: Sequence[int]) -> Vector:
        """Coordinates of a point of M^gp in ``gp_basis``."""
        sol = solve_integer(IntMatrix.from_columns(self.gp_basis, self.ambient_rank), x)
        if sol is None:
            raise ValueError(f"{tuple(x)} is not in the group generated by {self}")
        return sol


def gp_completion(M: AffineMonoid) -> IntMatrix:
    """Basis of M^gp as the columns of a d x rank matrix."""
    return IntMatrix.from_columns(M.gp_basis, M.ambient_rank)


def _decompose(M: AffineMonoid, x: Vector) -> MorphismVerdict:
    """Exact search for a nonnegative integer combination of generators.

    The generators lying in the lineality space of the cone generate a
    group; all other generators take a value >= 1 under the sum of the
    facet normals, which bounds their coefficients.
    """
    cone = M.cone
    c = cone.positive_functional()
    lin_gens = [g for g in M.generators if dot(c, g) == 0]
    other = sorted((g for g in M.generators if dot(c, g) != 0), key=lambda g: -dot(c, g))
    weights = [dot(c, g) for g in other]
    target = dot(c, x)
    lin_lattice = LatticeMembership(lin_gens, M.ambient_rank)
    d = M.ambient_rank
    nodes = 0
    coeffs = [0] * len(other)

    def search(i: int, budget: int, partial: list[int]) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > SEARCH_NODE_LIMIT:
            raise _SearchLimit
        if i == len(other):
            if budget != 0:
                return False
            residual = tuple(a - b for a, b in zip(x, partial))
            return residual in lin_lattice
        g, w = other[i], weights[i]
        if i == len(other) - 1:
            if budget % w:
                return False
            ks = [budget // w]
        else:
            ks = range(budget // w, -1, -1)
        for k in ks:
            coeffs[i] = k
            nxt = [p + k * gi for p, gi in zip(partial, g)]
            if search(i + 1, budget - k * w, nxt):
                return True
        coeffs[i] = 0
        return False

    try:
        found = search(0, target, [0] * d)
    except _SearchLimit:
        return MorphismVerdict.inconclusive(target, "search node limit reached")
    if found:
        combo = {g: k for g, k in zip(other, coeffs) if k}
        return MorphismVerdict.verified(combo)
    return MorphismVerdict.refuted(tuple(x), "no nonnegative combination of generators")


class _SearchLimit(Exception):
    pass


def contains(M: AffineMonoid, x: Sequence[int]) -> MorphismVerdict:
    x = tuple(int(v) for v in x)
    if len(x) != M.ambient_rank:
        raise ValueError(f"point {x} is not in Z^{M.ambient_rank}")
    if not any(x):
        return MorphismVerdict.verified({}, "empty combination")
    if not M.cone.contains(x):
        return MorphismVerdict.refuted(x, "outside the cone")
    if x not in M.gp_membership:
        return MorphismVerdict.refuted(x, "outside the group of fractions")
    return _decompose(M, x)


@dataclass(frozen=True)
class _PointedSplit:
    """gp coordinates t = W s where cone conditions only involve s[:r]."""

    W: IntMatrix
    W_inv: IntMatrix
    r: int
    facets: list[Vector]  # in s[:r] coordinates


def _split_lineality(M: AffineMonoid) -> tuple[list[Vector], _PointedSplit]:
    basis = M.gp_basis
    k = len(basis)
    gens_t = [M.gp_coordinates(g) for g in M.generators]
    cone_t = cone_from_generators(gens_t, k)
    A = cone_t.inequalities
    if A:
        snf = smith_normal_form(IntMatrix(A, k))
        W, W_inv, r = snf.V, snf.V_inv, snf.rank
    else:
        W, W_inv, r = IntMatrix.identity(k), IntMatrix.identity(k), 0
    AW = IntMatrix(A, k) @ W if A else None
    facets = [row[:r] for row in AW.rows] if AW is not None else []
    return gens_t, _PointedSplit(W, W_inv, r, facets)


def hilbert_basis(M: AffineMonoid) -> list[Vector]:
    """Generators of cone(M) ∩ M^gp: the Hilbert basis of the pointed part
    plus a basis of the lineality lattice and its negatives."""
    if M.rank > MAX_HILBERT_RANK:
        raise CapabilityError(f"Hilbert bases are only computed up to rank {MAX_HILBERT_RANK}, got {M.rank}")
    if not M.generators:
        return []
    gens_t, split = _split_lineality(M)
    k, r = len(M.gp_basis), split.r
    B = IntMatrix.from_columns(M.gp_basis, M.ambient_rank)

    def to_ambient(s: Sequence[int]) -> Vector:
        return B.apply(split.W.apply(s))

    out = []
    for i in range(r, k):
        e = tuple(int(j == i) for j in range(k))
        out.append(to_ambient(e))
        out.append(to_ambient(tuple(-x for x in e)))

    if r:
        pointed = [split.W_inv.apply(t)[:r] for t in gens_t]
        pointed = [g for g in pointed if any(g)]
        c = tuple(sum(col) for col in zip(*split.facets))
        wts = sorted((dot(c, g) for g in pointed), reverse=True)
        height = sum(wts[:r])
        lo, hi = [0] * r, [0] * r
        for g in pointed:
            w = dot(c, g)
            for i in range(r):
                v = height * g[i] / w
                lo[i] = min(lo[i], floor(v))
                hi[i] = max(hi[i], ceil(v))
        cands = []
        for y in itertools.product(*(range(lo[i], hi[i] + 1) for i in range(r))):
            h = dot(c, y)
            if 1 <= h <= height and all(dot(f, y) >= 0 for f in split.facets):
                cands.append((h, y))
        cands.sort()
        members = {y for _, y in cands}
        irreducible: list[Vector] = []
        for h, y in cands:
            reducible = any(
                tuple(a - b for a, b in zip(y, z)) in members for z in irreducible if dot(c, z) < h
            )
            if not reducible:
                irreducible.append(y)
        for y in irreducible:
            out.append(to_ambient(tuple(y) + (0,) * (k - r)))
    return sorted(set(out))


def is_saturated(M: AffineMonoid) -> MorphismVerdict:
    if M.rank > MAX_HILBERT_RANK:
        return MorphismVerdict.inconclusive(MAX_HILBERT_RANK, "rank above the Hilbert basis cap")
    pending = None
    for h in hilbert_basis(M):
        v = contains(M, h)
        if v.status is Status.REFUTED:
            n = _saturation_multiple(M, h)
            return MorphismVerdict.refuted((h, n), f"{n}*{h} lies in the monoid but {h} does not")
        if v.status is Status.INCONCLUSIVE:
            pending = v
    if pending is not None:
        return MorphismVerdict.inconclusive(pending.bound, "membership search limit reached")
    return MorphismVerdict.verified()


def _saturation_multiple(M: AffineMonoid, a: Vector, limit: int = 10_000) -> int | None:
    for n in range(2, limit):
        if contains(M, tuple(n * x for x in a)).status is Status.VERIFIED:
            return n
    return None


def saturate(M: AffineMonoid) -> AffineMonoid:
    return AffineMonoid(hilbert_basis(M), M.ambient_rank)


def same_monoid(M: AffineMonoid, N: AffineMonoid) -> bool:
    """Equality as subsets of Z^d (generator sets may differ)."""
    if M.ambient_rank != N.ambient_rank:
        return False
    return all(contains(N, g) for g in M.generators) and all(contains(M, g) for g in N.generators)


@dataclass(frozen=True)
class MonoidMorphism:
    """A monoid map P -> Q given by a lattice map of the ambient spaces."""

    source: AffineMonoid
    target: AffineMonoid
    matrix: IntMatrix
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        m = self.matrix
        if m.shape != (self.target.ambient_rank, self.source.ambient_rank):
            raise ValueError(
                f"matrix shape {m.shape} does not match Z^{self.source.ambient_rank} -> Z^{self.target.ambient_rank}"
            )
        if self.check:
            for g in self.source.generators:
                v = contains(self.target, m.apply(g))
                if v.status is not Status.VERIFIED:
                    raise ValueError(f"generator {g} maps to {m.apply(g)}, not in the target monoid ({v.status.value})")

    def __call__(self, x: Sequence[int]) -> Vector:
        return self.matrix.apply(x)

    @cached_property
    def image(self) -> AffineMonoid:
        return AffineMonoid([self(g) for g in self.source.generators], self.target.ambient_rank)

    @cached_property
    def gp_matrix(self) -> IntMatrix:
        """u^gp in gp coordinates: columns are images of the source gp basis
        written in the target gp basis."""
        cols = [self.target.gp_coordinates(self(b)) for b in self.source.gp_basis]
        return IntMatrix.from_columns(cols, self.target.rank)

    @cached_property
    def gp_cokernel(self) -> Cokernel:
        return cokernel_map(self.gp_matrix)

    def gp_injective(self) -> bool:
        return not kernel_basis(self.gp_matrix) if self.source.rank else True

    def compose(self, other: MonoidMorphism) -> MonoidMorphism:
        """``self ∘ other``."""
        return MonoidMorphism(other.source, self.target, self.matrix @ other.matrix, check=False)


def multiplication(n: int, r: int) -> MonoidMorphism:
    """[n]: N^r -> N^r."""
    N = AffineMonoid.free(r)
    return MonoidMorphism(N, N, IntMatrix.identity(r).scale(n))


def _require_saturated(*monoids: AffineMonoid):
    for M in monoids:
        v = is_saturated(M)
        if v.status is Status.REFUTED:
            raise ValueError(f"monoid {M} is not saturated: witness {v.witness}")


def is_exact(u: MonoidMorphism) -> MorphismVerdict:
    """Compare (u^gp)^{-1}(Q) with P by comparing cones inside P^gp."""
    _require_saturated(u.source, u.target)
    P, Q = u.source, u.target
    try:
        pre = HCone(
            P.ambient_rank,
            P.cone.equalities,
            tuple(tuple(dot(a, col) for col in u.matrix.columns()) for a in Q.cone.inequalities),
        )
        rays, lin = rays_of(pre)
    except CapabilityError as exc:
        return MorphismVerdict.inconclusive(None, str(exc))
    for v in rays + lin + [tuple(-x for x in l) for l in lin]:
        if not P.cone.contains(v):
            w = _into_lattice(P, v)
            return MorphismVerdict.refuted(w, f"{w} is in P^gp and maps into Q but is not in P")
    return MorphismVerdict.verified()


def _into_lattice(P: AffineMonoid, v: Vector) -> Vector:
    """Smallest positive multiple of ``v`` lying in P^gp."""
    for k in itertools.count(1):
        w = tuple(k * x for x in v)
        if w in P.gp_membership:
            return w


def _kummer_by_criterion(u: MonoidMorphism) -> MorphismVerdict:
    """Injective, exact, and finite cokernel of u^gp."""
    if not u.gp_injective():
        return MorphismVerdict.refuted(("kernel", kernel_basis(u.gp_matrix)[0]), "u^gp is not injective")
    ex = is_exact(u)
    if ex.status is not Status.VERIFIED:
        return ex
    coker = u.gp_cokernel
    if coker.free_rank:
        return MorphismVerdict.refuted(("cokernel", coker.free_rank), "coker(u^gp) is infinite")
    return MorphismVerdict.verified(coker.group)


def _kummer_by_definition(u: MonoidMorphism) -> MorphismVerdict:
    """Injective, and every generator of Q has a multiple in u(P)."""
    if not u.gp_injective():
        return MorphismVerdict.refuted(("kernel", kernel_basis(u.gp_matrix)[0]), "u is not injective")
    image = u.image
    multiples = {}
    for a in u.target.generators:
        if not image.cone.contains(a):
            return MorphismVerdict.refuted(("generator", a), f"no multiple of {a} lies in u(P)")
        for n in range(1, 10_000):
            v = contains(image, tuple(n * x for x in a))
            if v.status is Status.VERIFIED:
                multiples[a] = n
                break
        else:
            return MorphismVerdict.inconclusive(10_000, f"no multiple of {a} found below the bound")
    return MorphismVerdict.verified(multiples)


def is_kummer(u: MonoidMorphism) -> MorphismVerdict:
    """Kummer test through injectivity, exactness and finite cokernel,
    cross-checked against the definition (powers of every target element
    land in the image)."""
    _require_saturated(u.source, u.target)
    by_criterion = _kummer_by_criterion(u)
    by_definition = _kummer_by_definition(u)
    if Status.INCONCLUSIVE in (by_criterion.status, by_definition.status):
        return by_criterion if by_criterion.status is Status.INCONCLUSIVE else by_definition
    if by_criterion.status is not by_definition.status:
        raise AssertionError(f"Kummer code paths disagree on {u}: {by_criterion} vs {by_definition}")
    return by_criterion


@dataclass(frozen=True)
class IntegralityCertificate:
    """v with v∘u = [n] and v exact, in gp coordinates of the target."""

    v: MonoidMorphism
    u_coords: MonoidMorphism
    n: int


def integrality_certificate_free_base(u: MonoidMorphism) -> IntegralityCertificate:
    P, Q = u.source, u.target
    r = P.ambient_rank
    if P != AffineMonoid.free(r):
        raise ValueError(f"source must be N^{r}, got {P}")
    kv = is_kummer(u)
    if kv.status is not Status.VERIFIED:
        raise ValueError(f"u is not Kummer: {kv.detail}")
    n = u.gp_cokernel.group.exponent
    C = u.gp_matrix  # k x r, square since u is Kummer
    # n * C^{-1} is integral because n kills the cokernel
    cols = []
    for j in range(C.nrows):
        e = tuple(n * int(i == j) for i in range(C.nrows))
        sol = solve_integer(C, e)
        if sol is None:
            raise RuntimeError(f"n*C^-1 is not integral for n={n}")
        cols.append(sol)
    v_matrix = IntMatrix.from_columns(cols, r)
    Qc = AffineMonoid([Q.gp_coordinates(g) for g in Q.generators], Q.rank)
    u_c = MonoidMorphism(P, Qc, C)
    v = MonoidMorphism(Qc, P, v_matrix)
    if v_matrix @ C != IntMatrix.identity(r).scale(n):
        raise RuntimeError("v∘u differs from [n]")
    if is_exact(v).status is not Status.VERIFIED:
        raise RuntimeError("constructed v is not exact")
    return IntegralityCertificate(v, u_c, n)


def _points_in_box(M: AffineMonoid, bound: int) -> list[Vector]:
    rng = range(-bound, bound + 1)
    return [x for x in itertools.product(rng, repeat=M.ambient_rank) if contains(M, x)]


def check_integral_bounded(u: MonoidMorphism, bound: int) -> MorphismVerdict:
    """Look for a1, a2 in P and b1, b2 in Q with |coords| <= bound,
    u(a1)+b1 = u(a2)+b2, admitting no a3, a4 in P and b in Q with
    b1 = u(a3)+b, b2 = u(a4)+b and a1+a3 = a2+a4.

    Given a1 - a2 and b1 the condition reduces to: some a3 in P with
    a1 - a2 + a3 in P and b1 - u(a3) in Q.
    """
    P, Q = u.source, u.target
    Ps, Qs = _points_in_box(P, bound), _points_in_box(Q, bound)
    Qset = set(Qs)
    cQ = Q.cone.positive_functional()
    exact_a3 = Q.cone.is_pointed() and u.gp_injective() and all(dot(cQ, u(g)) > 0 for g in P.generators)
    seen = set()
    unresolved = False
    for a1, a2 in itertools.product(Ps, Ps):
        delta = tuple(x - y for x, y in zip(a1, a2))
        for b1 in Qs:
            if (delta, b1) in seen:
                continue
            seen.add((delta, b1))
            b2 = tuple(x + y for x, y in zip(u(delta), b1))
            if b2 not in Qset:
                continue
            ok = _integral_completion(u, delta, b1, cQ, exact_a3, bound)
            if ok is None:
                unresolved = True
            elif not ok:
                return MorphismVerdict.refuted((a1, a2, b1, b2), "integrality condition fails")
    detail = "no counterexample in the box" + ("; some cases unresolved" if unresolved else "")
    return MorphismVerdict.inconclusive(bound, detail)


def _integral_completion(u, delta, b1, cQ, exact, bound) -> bool | None:
    P, Q = u.source, u.target
    if exact:
        budget = dot(cQ, b1)
        gens = list(P.generators)
        wts = [dot(cQ, u(g)) for g in gens]
        a3_list = _combinations_within(gens, wts, budget, P.ambient_rank)
    else:
        a3_list = _points_in_box(P, 2 * bound)
    for a3 in a3_list:
        if contains(P, tuple(x + y for x, y in zip(delta, a3))) and contains(
            Q, tuple(x - y for x, y in zip(b1, u(a3)))
        ):
            return True
    return False if exact else None


def _combinations_within(gens, wts, budget, d) -> set[Vector]:
    out = set()

    def rec(i, left, acc):
        if i == len(gens):
            out.add(tuple(acc))
            return
        k = 0
        while k * wts[i] <= left:
            rec(i + 1, left - k * wts[i], [a + k * g for a, g in zip(acc, gens[i])])
            k += 1

    rec(0, budget, [0] * d)
    return out
