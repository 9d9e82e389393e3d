"""A Dedekind base with the log structure of an open complement.

The base is pure data: a finite set of named closed points, the class
group with the class of each point, the shape of the unit group, and the
subset D of points carrying the log structure. Elements of K^* are kept
in factored form (unit exponents, divisor), and a class of
H^1_kpl(X, G_m) = DivRat(X, D)/Divp(X) is kept as the canonical pair
(fractional parts on D, class of the integral floor).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import floor
from typing import Iterable, Mapping, Sequence

from .lattice import FiniteAbelianGroup, GroupElement, IntMatrix, QmodZ, solve_integer
from .report import AuditReport


class BaseValidationError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


class NotPrincipalError(ValueError):
    pass


@dataclass(frozen=True)
class DedekindLogBase:
    name: str
    pic_factors: tuple[int, ...]
    places: tuple[str, ...]
    place_classes: tuple[tuple[int, ...], ...]
    unit_rank: int
    unit_torsion: int
    log_support: tuple[str, ...]

    @classmethod
    def create(
        cls,
        name: str,
        pic: Sequence[int],
        place_classes: Mapping[str, Sequence[int]],
        unit_rank: int,
        unit_torsion: int,
        log_support: Iterable[str] = (),
    ) -> DedekindLogBase:
        b = cls(
            name=name,
            pic_factors=tuple(pic),
            places=tuple(place_classes),
            place_classes=tuple(tuple(v) for v in place_classes.values()),
            unit_rank=unit_rank,
            unit_torsion=unit_torsion,
            log_support=tuple(log_support),
        )
        errors = validate_base(b)
        if errors:
            raise BaseValidationError(errors)
        return b

    def with_support(self, support: Iterable[str]) -> DedekindLogBase:
        b = DedekindLogBase(
            self.name, self.pic_factors, self.places, self.place_classes,
            self.unit_rank, self.unit_torsion, tuple(support),
        )
        errors = validate_base(b)
        if errors:
            raise BaseValidationError(errors)
        return b

    @cached_property
    def pic(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup(self.pic_factors)

    @cached_property
    def _class_map(self) -> dict[str, GroupElement]:
        return {p: self.pic(c) for p, c in zip(self.places, self.place_classes)}

    def place_class(self, p: str) -> GroupElement:
        try:
            return self._class_map[p]
        except KeyError:
            raise KeyError(f"unknown place {p!r} (base {self.name} has {list(self.places)})") from None

    @cached_property
    def support(self) -> tuple[str, ...]:
        """D, in the order the places were declared."""
        return tuple(p for p in self.places if p in set(self.log_support))

    def in_support(self, p: str) -> bool:
        return p in self.support

    def unit(self, torsion: int = 0, free: Sequence[int] = ()) -> FactoredK:
        return FactoredK.make(self, torsion, free, Divisor())

    def element(self, divisor: Mapping[str, int] | Divisor, torsion: int = 0, free: Sequence[int] = ()) -> FactoredK:
        return FactoredK.make(self, torsion, free, Divisor(divisor))

    def one(self) -> FactoredK:
        return self.unit()

    def places_generate_pic(self, places: Iterable[str] | None = None) -> bool:
        places = list(self.places if places is None else places)
        return all(divisor_with_class(self, g, places) is not None for g in self.pic.gens())


def validate_base(b: DedekindLogBase) -> list[str]:
    errors = []
    try:
        FiniteAbelianGroup(b.pic_factors)
    except ValueError as exc:
        errors.append(f"pic: {exc}")
    if len(set(b.places)) != len(b.places):
        errors.append("places: duplicate place names")
    if len(b.place_classes) != len(b.places):
        errors.append("places: every place needs a pic_class")
    for p, c in zip(b.places, b.place_classes):
        if len(c) != len(b.pic_factors):
            errors.append(f"places.{p}.pic_class: has {len(c)} coordinates, pic has {len(b.pic_factors)}")
        elif any(not 0 <= x < d for x, d in zip(c, b.pic_factors)):
            errors.append(f"places.{p}.pic_class: coordinates {list(c)} not reduced modulo {list(b.pic_factors)}")
    if b.unit_rank < 0:
        errors.append("base.unit_rank: must be >= 0")
    if b.unit_torsion < 1:
        errors.append("base.unit_torsion: must be >= 1")
    for p in b.log_support:
        if p not in b.places:
            errors.append(f"log.support: {p!r} is not a declared place")
    return errors


@dataclass(frozen=True)
class Divisor:
    """Finitely supported integer combination of places."""

    coeffs: tuple[tuple[str, int], ...] = ()

    def __init__(self, coeffs: Mapping[str, int] | Iterable[tuple[str, int]] | Divisor = ()):
        if isinstance(coeffs, Divisor):
            items = coeffs.coeffs
        elif isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = coeffs
        acc: dict[str, int] = {}
        for p, k in items:
            acc[p] = acc.get(p, 0) + int(k)
        object.__setattr__(self, "coeffs", tuple(sorted((p, k) for p, k in acc.items() if k)))

    def __getitem__(self, p: str) -> int:
        return dict(self.coeffs).get(p, 0)

    def items(self):
        return iter(self.coeffs)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(p for p, _ in self.coeffs)

    def __add__(self, other: Divisor) -> Divisor:
        return Divisor(list(self.coeffs) + list(other.coeffs))

    def __neg__(self) -> Divisor:
        return Divisor((p, -k) for p, k in self.coeffs)

    def __sub__(self, other: Divisor) -> Divisor:
        return self + (-other)

    def __rmul__(self, k: int) -> Divisor:
        return Divisor((p, k * c) for p, c in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_effective(self) -> bool:
        return all(k >= 0 for _, k in self.coeffs)

    def as_dict(self) -> dict[str, int]:
        return dict(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{k}[{p}]" if k != 1 else f"[{p}]" for p, k in self.coeffs).replace("+ -", "- ")


def class_of_divisor(b: DedekindLogBase, d: Divisor) -> GroupElement:
    total = b.pic.zero()
    for p, k in d.items():
        total = total + k * b.place_class(p)
    return total


def divisor_with_class(b: DedekindLogBase, g: GroupElement, places: Sequence[str] | None = None) -> Divisor | None:
    """A divisor supported on ``places`` whose class is ``g``, if one exists."""
    places = list(b.places if places is None else places)
    k = b.pic.ngens
    if k == 0:
        return Divisor()
    cols = [b.place_class(p).coords for p in places]
    cols += [tuple(d if i == j else 0 for i in range(k)) for j, d in enumerate(b.pic_factors)]
    sol = solve_integer(IntMatrix.from_columns(cols, k), g.coords)
    if sol is None:
        return None
    return Divisor(zip(places, sol[: len(places)]))


@dataclass(frozen=True)
class FactoredK:
    """z in K^*: torsion unit exponent mod w, free unit exponents, div(z)."""

    base: DedekindLogBase
    torsion: int
    free: tuple[int, ...]
    divisor: Divisor

    @classmethod
    def make(cls, b: DedekindLogBase, torsion: int, free: Sequence[int], divisor: Divisor) -> FactoredK:
        free = tuple(int(x) for x in free) or (0,) * b.unit_rank
        if len(free) != b.unit_rank:
            raise ValueError(f"expected {b.unit_rank} free unit exponents, got {len(free)}")
        for p in divisor.support:
            b.place_class(p)
        cls_ = class_of_divisor(b, divisor)
        if not cls_.is_zero():
            raise NotPrincipalError(f"divisor {divisor} has class {cls_} != 0 in Pic, so it is not div(z)")
        return cls(b, int(torsion) % b.unit_torsion, free, divisor)

    def _check(self, other: FactoredK):
        if other.base != self.base:
            raise ValueError("elements over different bases")

    def __mul__(self, other: FactoredK) -> FactoredK:
        self._check(other)
        return FactoredK(
            self.base,
            (self.torsion + other.torsion) % self.base.unit_torsion,
            tuple(a + c for a, c in zip(self.free, other.free)),
            self.divisor + other.divisor,
        )

    def __pow__(self, k: int) -> FactoredK:
        return FactoredK(
            self.base, (k * self.torsion) % self.base.unit_torsion, tuple(k * a for a in self.free), k * self.divisor
        )

    def inverse(self) -> FactoredK:
        return self ** -1

    def __truediv__(self, other: FactoredK) -> FactoredK:
        return self * other.inverse()

    def valuation(self, p: str) -> int:
        self.base.place_class(p)
        return self.divisor[p]

    def is_unit(self) -> bool:
        return self.divisor.is_zero()

    def is_one(self) -> bool:
        return self.is_unit() and self.torsion == 0 and not any(self.free)

    def __str__(self):
        parts = []
        if self.torsion:
            parts.append(f"zeta^{self.torsion}")
        parts += [f"eps{i + 1}^{e}" for i, e in enumerate(self.free) if e]
        unit = "*".join(parts) or "1"
        return f"{unit} | div = {self.divisor}"


def factored_mul(a: FactoredK, b: FactoredK) -> FactoredK:
    return a * b


def factored_pow(a: FactoredK, k: int) -> FactoredK:
    return a ** k


def principal_divisor(z: FactoredK) -> Divisor:
    return z.divisor


@dataclass(frozen=True)
class RatDivisor:
    """integer_part + sum of frac_p [p] with frac_p in [0, 1) and p in D."""

    integer_part: Divisor
    frac_part: tuple[tuple[str, QmodZ], ...] = ()

    def __init__(self, integer_part: Divisor | Mapping[str, int] = Divisor(), frac_part: Mapping[str, QmodZ] | Iterable = ()):
        items = frac_part.items() if isinstance(frac_part, Mapping) else frac_part
        fr = tuple(sorted((p, QmodZ(q.value if isinstance(q, QmodZ) else q)) for p, q in items))
        object.__setattr__(self, "integer_part", Divisor(integer_part))
        object.__setattr__(self, "frac_part", tuple((p, q) for p, q in fr if not q.is_zero()))

    @classmethod
    def from_rational(cls, coeffs: Mapping[str, Fraction | int]) -> RatDivisor:
        integer, frac = {}, {}
        for p, c in coeffs.items():
            c = Fraction(c)
            fl = floor(c)
            integer[p] = fl
            if c != fl:
                frac[p] = QmodZ(c - fl)
        return cls(Divisor(integer), frac)

    def rational_coeffs(self) -> dict[str, Fraction]:
        out = {p: Fraction(k) for p, k in self.integer_part.items()}
        for p, q in self.frac_part:
            out[p] = out.get(p, Fraction(0)) + q.value
        return {p: c for p, c in out.items() if c}

    def __add__(self, other: RatDivisor | Divisor) -> RatDivisor:
        if isinstance(other, Divisor):
            other = RatDivisor(other)
        coeffs = self.rational_coeffs()
        for p, c in other.rational_coeffs().items():
            coeffs[p] = coeffs.get(p, Fraction(0)) + c
        return RatDivisor.from_rational(coeffs)

    def validate(self, b: DedekindLogBase) -> None:
        for p in self.integer_part.support:
            b.place_class(p)
        for p, _ in self.frac_part:
            if not b.in_support(p):
                raise ValueError(f"fractional coefficient at {p!r}, which is outside the log support {list(b.support)}")


@dataclass(frozen=True)
class LogGmClass:
    """Canonical representative of a class in DivRat(X, D)/Divp(X)."""

    base: DedekindLogBase = field(repr=False)
    frac: tuple[QmodZ, ...]  # aligned with base.support
    picpart: GroupElement

    def frac_map(self) -> dict[str, QmodZ]:
        return dict(zip(self.base.support, self.frac))

    def nu(self) -> dict[str, QmodZ]:
        return self.frac_map()

    def is_zero(self) -> bool:
        return all(q.is_zero() for q in self.frac) and self.picpart.is_zero()

    def __add__(self, other: LogGmClass) -> LogGmClass:
        return loggm_add(self, other)

    def __neg__(self) -> LogGmClass:
        return loggm_scale(self, -1)

    def __rmul__(self, k: int) -> LogGmClass:
        return loggm_scale(self, k)

    def __str__(self):
        fr = ", ".join(f"{p}: {q}" for p, q in self.frac_map().items() if not q.is_zero())
        return f"(frac {{{fr}}}, pic {self.picpart})"


def loggm_zero(b: DedekindLogBase) -> LogGmClass:
    return LogGmClass(b, tuple(QmodZ(0) for _ in b.support), b.pic.zero())


def loggm_from_ratdivisor(b: DedekindLogBase, E: RatDivisor) -> LogGmClass:
    E.validate(b)
    fr = dict(E.frac_part)
    return LogGmClass(b, tuple(fr.get(p, QmodZ(0)) for p in b.support), class_of_divisor(b, E.integer_part))


def loggm_from_rational(b: DedekindLogBase, coeffs: Mapping[str, Fraction | int]) -> LogGmClass:
    return loggm_from_ratdivisor(b, RatDivisor.from_rational(coeffs))


def loggm_add(x: LogGmClass, y: LogGmClass) -> LogGmClass:
    if x.base != y.base:
        raise ValueError("classes over different bases")
    b = x.base
    frac, pic = [], x.picpart + y.picpart
    for p, qx, qy in zip(b.support, x.frac, y.frac):
        s = qx.value + qy.value
        carry = floor(s)
        if carry:
            pic = pic + carry * b.place_class(p)
        frac.append(QmodZ(s))
    return LogGmClass(b, tuple(frac), pic)


def loggm_scale(x: LogGmClass, k: int) -> LogGmClass:
    b = x.base
    frac, pic = [], k * x.picpart
    for p, q in zip(b.support, x.frac):
        s = k * q.value
        carry = floor(s)
        if carry:
            pic = pic + carry * b.place_class(p)
        frac.append(QmodZ(s))
    return LogGmClass(b, tuple(frac), pic)


def _frac_tuples(support: Sequence[str], max_den: int):
    values = sorted({Fraction(a, d) for d in range(1, max_den + 1) for a in range(d)})
    for combo in itertools.product(values, repeat=len(support)):
        yield dict(zip(support, combo))


def _window_divisors(places: Sequence[str], radius: int):
    for coeffs in itertools.product(range(-radius, radius + 1), repeat=len(places)):
        yield Divisor(zip(places, coeffs))


def exactness_audit_gm(b: DedekindLogBase, max_den: int = 4, radius: int = 1) -> AuditReport:
    """Audit 0 -> Pic(X) -> H^1(X, G_m) -> (+)_{p in D} Q/Z -> 0 on samples."""
    rep = AuditReport(f"G_m sequence over {b.name}, D={list(b.support)}")
    fracs = list(_frac_tuples(b.support, max_den))

    bad = [f for f in fracs if loggm_from_ratdivisor(b, RatDivisor(Divisor(), f)).nu() != {p: QmodZ(f[p]) for p in b.support}]
    rep.add("nu surjective onto sampled fractional tuples", not bad, f"denominators <= {max_den}", len(fracs))

    kernel_ok, seen = True, {}
    for g in b.pic.elements():
        d = divisor_with_class(b, g)
        if d is None:
            rep.violations.append(f"no divisor of class {g}: places do not generate Pic")
            kernel_ok = False
            continue
        c = loggm_from_ratdivisor(b, RatDivisor(d))
        if any(not q.is_zero() for q in c.frac) or c.picpart != g:
            kernel_ok = False
        seen[c] = g
    rep.add("Pic(X) -> ker(nu) is bijective", kernel_ok and len(seen) == b.pic.order, count=len(seen))

    window = list(_window_divisors(b.places, radius))
    sample = fracs[: min(len(fracs), 16)]
    fiber_ok = True
    for f in sample:
        classes = {loggm_from_ratdivisor(b, RatDivisor(d, f)) for d in window}
        if len(classes) != b.pic.order or any(c.nu() != {p: QmodZ(f[p]) for p in b.support} for c in classes):
            fiber_ok = False
            rep.violations.append(f"fiber over {f} has {len(classes)} classes, expected {b.pic.order}")
    rep.add("every nu-fiber is a Pic(X)-coset", fiber_ok, f"{len(window)} integral shifts per fiber", len(sample))

    principal_ok = True
    for d in window:
        if class_of_divisor(b, d).is_zero():
            for f in sample[:4]:
                E = RatDivisor(Divisor(), f)
                if loggm_from_ratdivisor(b, E + d) != loggm_from_ratdivisor(b, E):
                    principal_ok = False
    rep.add("principal divisors map to zero", principal_ok)
    return rep
