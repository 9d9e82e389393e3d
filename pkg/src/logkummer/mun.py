"""mu_n-torsors over a Dedekind log base and their invariants.

A class of H^1_kpl(X, mu_n) is represented by a Kummer element z of K^*
with v_p(z) = 0 mod n away from D. Writing v_p(z) = n q_p + r_p
(euclidean division), the invariants are

    rho(T)   = class of (1/n) div(z)          in H^1_kpl(X, G_m)[n]
    nu_n(T)  = sum over p in D of (r_p/n) p   in (+) (1/n Z/Z) p
    c(z)     = -sum_p q_p [p]                 in Pic(X)
    cl(T)    = (0, c, 2c, ..., (n-1)c)        in Pic(X)^n
    pi^log(T)= (0, rho, 2 rho, ..., (n-1)rho) in H^1_kpl(X, G_m)^n

so that the Pic part of rho(T) is -c(z).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Mapping, Sequence

from .dedekind import (
    DedekindLogBase,
    Divisor,
    FactoredK,
    LogGmClass,
    class_of_divisor,
    loggm_add,
    loggm_from_rational,
    loggm_scale,
    loggm_zero,
)
from .lattice import GroupElement, IntMatrix, QmodZ, image_basis, kernel_basis, solve_integer
from .report import AuditReport


class MembershipError(ValueError):
    def __init__(self, place: str, valuation: int, n: int):
        self.place, self.valuation, self.n = place, valuation, n
        super().__init__(
            f"v_{place}(z) = {valuation} is not divisible by n = {n} at {place}, which is outside the log support"
        )


class RacError(ValueError):
    def __init__(self, negative: dict[str, int], off_support: dict[str, int]):
        self.negative, self.off_support = negative, off_support
        parts = []
        if negative:
            parts.append(f"branch divisor is negative at {negative}")
        if off_support:
            parts.append(f"branch divisor is supported outside D at {off_support}")
        super().__init__("; ".join(parts))


@lru_cache(maxsize=None)
def _principal_lattice(b: DedekindLogBase, places: tuple[str, ...]) -> tuple[tuple[int, ...], ...]:
    """Basis of {d in Z^places : class(d) = 0 in Pic}, one vector per place."""
    k = b.pic.ngens
    m = len(places)
    if k == 0:
        return tuple(tuple(int(i == j) for j in range(m)) for i in range(m))
    cols = [b.place_class(p).coords for p in places]
    cols += [tuple(d if i == j else 0 for i in range(k)) for j, d in enumerate(b.pic_factors)]
    ker = kernel_basis(IntMatrix.from_columns(cols, k))
    proj = [v[:m] for v in ker]
    return tuple(image_basis(IntMatrix.from_columns(proj, m)))


def _class_key(b: DedekindLogBase, n: int, z: FactoredK) -> tuple:
    """Canonical key of z modulo (K^*)^n.

    z/z' is an n-th power iff its torsion exponent lies in gcd(n, w) Z/w,
    its free exponents lie in nZ, and its divisor lies in n times the
    lattice of principal divisors.
    """
    g = gcd(n, b.unit_torsion)
    basis = _principal_lattice(b, b.places)
    vec = tuple(z.divisor[p] for p in b.places)
    coords = solve_integer(IntMatrix.from_columns(basis, len(b.places)), vec) if basis else ()
    if coords is None:
        raise AssertionError("divisor of a K^* element is not principal")
    return (z.torsion % g, tuple(x % n for x in z.free), tuple(x % n for x in coords))


@dataclass(frozen=True, eq=False)
class MunTorsorClass:
    base: DedekindLogBase
    n: int
    rep: FactoredK

    @cached_property
    def key(self) -> tuple:
        return _class_key(self.base, self.n, self.rep)

    def __eq__(self, other):
        if not isinstance(other, MunTorsorClass):
            return NotImplemented
        return self.base == other.base and self.n == other.n and self.key == other.key

    def __hash__(self):
        return hash((self.n, self.key))

    def __mul__(self, other: MunTorsorClass) -> MunTorsorClass:
        if other.n != self.n:
            raise ValueError("torsors for different n")
        return MunTorsorClass(self.base, self.n, self.rep * other.rep)

    def is_trivial(self) -> bool:
        return self == torsor_from_element(self.base, self.n, self.base.one())


def torsor_from_element(b: DedekindLogBase, n: int, z: FactoredK) -> MunTorsorClass:
    if n < 1:
        raise ValueError("n must be >= 1")
    if z.base != b:
        raise ValueError("element belongs to another base")
    for p, v in z.divisor.items():
        if not b.in_support(p) and v % n:
            raise MembershipError(p, v, n)
    return MunTorsorClass(b, n, z)


def _euclid(T: MunTorsorClass) -> dict[str, tuple[int, int]]:
    return {p: divmod(v, T.n) for p, v in T.rep.divisor.items()}


def rho(T: MunTorsorClass) -> LogGmClass:
    return loggm_from_rational(T.base, {p: Fraction(v, T.n) for p, v in T.rep.divisor.items()})


def nu(T: MunTorsorClass) -> dict[str, QmodZ]:
    return {p: QmodZ(T.rep.divisor[p], T.n) for p in T.base.support}


def is_fppf(T: MunTorsorClass) -> bool:
    return all(q.is_zero() for q in nu(T).values())


def ramification_index(T: MunTorsorClass, p: str) -> int:
    v = T.rep.valuation(p)
    return T.n // gcd(T.n, v)


def c_of(T: MunTorsorClass) -> GroupElement:
    q = Divisor({p: qr[0] for p, qr in _euclid(T).items()})
    return -class_of_divisor(T.base, q)


def cl_of(T: MunTorsorClass) -> list[GroupElement]:
    c = c_of(T)
    return [k * c for k in range(T.n)]


def pilog_of(T: MunTorsorClass) -> list[LogGmClass]:
    r = rho(T)
    out = [loggm_zero(T.base)]
    for _ in range(1, T.n):
        out.append(loggm_add(out[-1], r))
    return out


@dataclass(frozen=True)
class GaloisStructure:
    cl_tuple: tuple[GroupElement, ...]
    pilog_tuple: tuple[LogGmClass, ...]


def galois_structure(T: MunTorsorClass) -> GaloisStructure:
    return GaloisStructure(tuple(cl_of(T)), tuple(pilog_of(T)))


def unit_to_torsor(b: DedekindLogBase, n: int, u: FactoredK) -> MunTorsorClass:
    if not u.is_unit():
        raise ValueError(f"{u} is not a unit")
    return torsor_from_element(b, n, u)


def theta(b: DedekindLogBase, n: int, frac_divisor: Mapping[str, QmodZ | Fraction]) -> GroupElement:
    """(k_p/n)_p -> class of sum k_p [p] in Pic(X)/n."""
    target, project = b.pic.quotient_by_multiples(n)
    d = {}
    for p, q in frac_divisor.items():
        q = q if isinstance(q, QmodZ) else QmodZ(q)
        if n % q.denominator:
            raise ValueError(f"coefficient {q} at {p} does not have a denominator dividing n = {n}")
        if not b.in_support(p):
            raise ValueError(f"{p!r} is not in the log support")
        d[p] = q.numerator * (n // q.denominator)
    return project(class_of_divisor(b, Divisor(d)))


@dataclass(frozen=True)
class RacElement:
    """A pair (L, phi: L^n -> O_X) recorded as (I, z): L is the fractional
    ideal with divisor I and phi is multiplication by z, so the image of phi
    has divisor div(z) + n I (the branch divisor)."""

    base: DedekindLogBase
    n: int
    I: Divisor
    z: FactoredK

    @property
    def branch_divisor(self) -> Divisor:
        return self.z.divisor + self.n * self.I


def rac_make(b: DedekindLogBase, n: int, I: Divisor | Mapping[str, int], z: FactoredK) -> RacElement:
    I = Divisor(I)
    for p in I.support:
        b.place_class(p)
    delta = z.divisor + n * I
    negative = {p: k for p, k in delta.items() if k < 0}
    off = {p: k for p, k in delta.items() if k and not b.in_support(p)}
    if negative or off:
        raise RacError(negative, off)
    return RacElement(b, n, I, z)


def rac_neutral(b: DedekindLogBase, n: int) -> RacElement:
    return RacElement(b, n, Divisor(), b.one())


def rac_mul(x: RacElement, y: RacElement) -> RacElement:
    if x.base != y.base or x.n != y.n:
        raise ValueError("Rac elements over different bases or n")
    return RacElement(x.base, x.n, x.I + y.I, x.z * y.z)


def _is_unit_nth_power(b: DedekindLogBase, n: int, u: FactoredK) -> bool:
    return u.is_unit() and u.torsion % gcd(n, b.unit_torsion) == 0 and all(e % n == 0 for e in u.free)


def rac_eq(x: RacElement, y: RacElement) -> bool:
    """An isomorphism O(I_x) -> O(I_y) compatible with the trivializations
    is multiplication by some h with div(h) = I_x - I_y and z_y = z_x h^-n
    up to an n-th power of a unit."""
    if x.base != y.base or x.n != y.n:
        return False
    b, n = x.base, x.n
    diff = x.I - y.I
    if not class_of_divisor(b, diff).is_zero():
        return False
    h = b.element(diff)
    q = y.z / x.z * h ** -n
    return _is_unit_nth_power(b, n, q)


def rac_to_torsor(r: RacElement) -> MunTorsorClass:
    return torsor_from_element(r.base, r.n, r.z)


def rac_of_unit(b: DedekindLogBase, n: int, alpha: FactoredK) -> RacElement:
    """The map alpha -> (G_m, tau_alpha)."""
    if not alpha.is_unit():
        raise ValueError(f"{alpha} is not a unit")
    return RacElement(b, n, Divisor(), alpha)


def rac_forget(r: RacElement) -> LogGmClass:
    """(L, tau) -> L, computed as the class of -I + (1/n) Delta."""
    coeffs: dict[str, Fraction] = {p: Fraction(-k) for p, k in r.I.items()}
    for p, k in r.branch_divisor.items():
        coeffs[p] = coeffs.get(p, Fraction(0)) + Fraction(k, r.n)
    return loggm_from_rational(r.base, coeffs)


def kernel_witness(b: DedekindLogBase, n: int) -> RacElement | None:
    """(I, iota) with I an integral ideal supported on D, chosen non-principal
    when possible: a nonzero element of Rac(X, D, n) with trivial torsor."""
    if not b.support:
        return None
    for p in b.support:
        if not b.place_class(p).is_zero():
            return rac_make(b, n, {p: 1}, b.one())
    return rac_make(b, n, {b.support[0]: 1}, b.one())


# ---------------------------------------------------------------- enumeration

def unit_representatives(b: DedekindLogBase, n: int) -> list[FactoredK]:
    """Representatives of G_m(X)/n."""
    g = gcd(n, b.unit_torsion)
    return [b.unit(t, f) for t in range(g) for f in itertools.product(range(n), repeat=b.unit_rank)]


def enumerate_torsors(b: DedekindLogBase, n: int, places: Sequence[str], support: Iterable[str] | None = None) -> list[MunTorsorClass]:
    """All classes of H^1_kpl(X, mu_n) represented by elements whose divisor
    lives on ``places``, taking ``support`` (default: D) as branch locus."""
    places = tuple(places)
    branch = set(b.support if support is None else support)
    basis = _principal_lattice(b, places)
    divisors = []
    for coords in itertools.product(range(n), repeat=len(basis)):
        vec = [sum(c * v[i] for c, v in zip(coords, basis)) for i in range(len(places))]
        if all(x % n == 0 for p, x in zip(places, vec) if p not in branch):
            divisors.append(Divisor(zip(places, vec)))
    units = unit_representatives(b, n)
    out = []
    for u in units:
        for d in divisors:
            out.append(torsor_from_element(b, n, u * b.element(d)))
    return out


def audit_mun_sequence(b: DedekindLogBase, n: int, support_sample: Sequence[str]) -> AuditReport:
    """Audit the Kummer sequences on every class supported on the sample:

        0 -> G_m(X)/n -d-> H^1(X, mu_n) -rho-> H^1(X, G_m)[n] -> 0
        0 -> H^1_fppf(X, mu_n) -> H^1(X, mu_n) -nu-> (+)(1/n Z/Z) p -theta-> Pic(X)/n
    """
    S = tuple(support_sample)
    D = [p for p in b.support if p in S]
    rep = AuditReport(f"mu_{n} sequences over {b.name}, D={list(b.support)}, sample={list(S)}")
    generates = b.places_generate_pic(S)
    if not generates:
        rep.add("sample places generate Pic(X)", False, "surjectivity checks below are not meaningful")

    classes = enumerate_torsors(b, n, S)
    keys = {T.key for T in classes}
    rep.add("enumeration is injective on classes", len(keys) == len(classes), count=len(classes))

    fppf = enumerate_torsors(b, n, S, support=())
    ker_nu = {T.key for T in classes if is_fppf(T)}
    rep.add("ker(nu_n) = H^1_fppf(X, mu_n)", ker_nu == {T.key for T in fppf}, count=len(ker_nu))

    im_nu = {tuple(nu(T)[p] for p in D) for T in classes}
    values = [QmodZ(a, n) for a in range(n)]
    ker_theta = set()
    for combo in itertools.product(values, repeat=len(D)):
        if theta(b, n, dict(zip(D, combo))).is_zero():
            ker_theta.add(combo)
    rep.add("im(nu_n) ⊆ ker(theta_n)", im_nu <= ker_theta, count=len(im_nu))
    rep.add("ker(theta_n) ⊆ im(nu_n)", ker_theta <= im_nu, count=len(ker_theta))

    units = unit_representatives(b, n)
    im_d = {unit_to_torsor(b, n, u).key for u in units}
    rep.add("d is injective on G_m(X)/n", len(im_d) == len(units), count=len(units))
    rhos = {T.key: rho(T) for T in classes}
    ker_rho = {k for k, r in rhos.items() if r.is_zero()}
    rep.add("ker(rho) = im(d)", ker_rho == im_d, count=len(ker_rho))
    rep.add("rho lands in H^1(X, G_m)[n]", all(loggm_scale(r, n).is_zero() for r in rhos.values()))

    torsion = set()
    for combo in itertools.product(values, repeat=len(D)):
        for g in b.pic.elements():
            x = LogGmClass(b, tuple(dict(zip(D, combo)).get(p, QmodZ(0)) for p in b.support), g)
            if loggm_scale(x, n).is_zero():
                torsion.add(x)
    image = set(rhos.values())
    rep.add("rho surjects onto H^1(X, G_m)[n] (classes over the sample)", torsion <= image, count=len(torsion))

    hom_ok = True
    sample = classes[:24]
    for T1, T2 in itertools.product(sample, sample):
        T = T1 * T2
        if rho(T) != loggm_add(rho(T1), rho(T2)):
            hom_ok = False
            rep.violations.append(f"rho not additive on {T1.rep}, {T2.rep}")
        if nu(T) != {p: nu(T1)[p] + nu(T2)[p] for p in b.support}:
            hom_ok = False
            rep.violations.append(f"nu not additive on {T1.rep}, {T2.rep}")
    rep.add("rho and nu_n are homomorphisms", hom_ok, count=len(sample) ** 2)
    return rep
