import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from logkummer.dedekind import (
    BaseValidationError,
    DedekindLogBase,
    Divisor,
    NotPrincipalError,
    RatDivisor,
    class_of_divisor,
    exactness_audit_gm,
    factored_mul,
    factored_pow,
    loggm_add,
    loggm_from_ratdivisor,
    loggm_from_rational,
    loggm_scale,
    loggm_zero,
    validate_base,
)
from logkummer.lattice import QmodZ

from conftest import base_qs5, base_z

half = Fraction(1, 2)


class TestBase:
    def test_valid_bases(self):
        assert validate_base(base_z()) == []
        assert validate_base(base_qs5()) == []

    def test_place_class_outside_pic(self):
        with pytest.raises(BaseValidationError) as exc:
            DedekindLogBase.create("bad", [2], {"p": [1, 0]}, 0, 2)
        assert any(e.startswith("places.p.pic_class") for e in exc.value.errors)

    def test_support_and_factors(self):
        with pytest.raises(BaseValidationError):
            DedekindLogBase.create("bad", [], {"2": []}, 0, 2, ["7"])
        with pytest.raises(BaseValidationError):
            DedekindLogBase.create("bad", [4, 2], {}, 0, 2)
        with pytest.raises(BaseValidationError):
            DedekindLogBase.create("bad", [], {}, 0, 0)

    def test_pic_generation(self, qbase):
        assert qbase.places_generate_pic()
        assert not qbase.places_generate_pic(["p5"])


class TestFactoredK:
    def test_inverse(self, qbase):
        z = qbase.element({"p2": 1, "p3": 1})
        assert (z * z.inverse()).is_one()

    def test_product_over_z(self, zbase):
        z = factored_mul(zbase.element({"2": 1}), zbase.element({"5": 1}))
        assert z.divisor == Divisor({"2": 1, "5": 1})

    def test_norm_six(self, qbase):
        a = qbase.element({"p2": 1, "p3": 1})
        b = qbase.element({"p2": 1, "p3b": 1})
        assert (a * b).divisor == Divisor({"p2": 2, "p3": 1, "p3b": 1})
        assert factored_pow(a, 3).divisor == Divisor({"p2": 3, "p3": 3})

    def test_principality_enforced(self, qbase, zbase):
        with pytest.raises(NotPrincipalError):
            qbase.element({"p2": 1})
        with pytest.raises(NotPrincipalError):
            qbase.element({"p3": 1, "p5": 1})
        # trivial Pic accepts every divisor
        zbase.element({"2": 5, "3": -2})

    def test_unit_torsion_reduced(self, zbase):
        u = zbase.unit(1)
        assert (u * u).is_one()
        assert zbase.unit(3) == u

    def test_mismatched_base(self, zbase, qbase):
        with pytest.raises(ValueError):
            zbase.one() * qbase.one()


class TestClasses:
    def test_class_of_divisor(self, qbase):
        assert class_of_divisor(qbase, qbase.element({"p2": 2}).divisor).is_zero()
        assert class_of_divisor(qbase, Divisor({"p2": 1})) == qbase.pic((1,))
        assert class_of_divisor(qbase, Divisor({"p2": 2})).is_zero()

    def test_from_ratdivisor_examples(self, zbase):
        assert loggm_from_ratdivisor(zbase, RatDivisor(zbase.element({"2": 3, "5": -1}).divisor)).is_zero()
        c = loggm_from_rational(zbase, {"5": half})
        assert c.frac_map() == {"5": QmodZ(half)} and c.picpart.is_zero()
        assert loggm_from_rational(zbase, {"5": Fraction(3, 2)}) == c

    def test_frac_off_support_rejected(self, zbase):
        with pytest.raises(ValueError):
            loggm_from_rational(zbase, {"2": half})

    def test_add_with_carries(self, zbase):
        x = loggm_from_rational(zbase, {"5": half})
        assert loggm_add(x, loggm_zero(zbase)) == x
        assert loggm_add(x, x).is_zero()
        b = base_qs5(["p2"])
        y = loggm_from_rational(b, {"p2": half})
        s = loggm_add(y, y)
        assert not s.is_zero()
        assert s.frac_map() == {"p2": QmodZ(0)} and s.picpart == b.pic((1,))

    def test_audit_z(self, zbase):
        assert exactness_audit_gm(zbase).passed

    def test_audit_qs5(self):
        assert exactness_audit_gm(base_qs5(["p2"])).passed

    def test_trivial_support(self):
        b = base_qs5([])
        assert exactness_audit_gm(b).passed
        assert {loggm_from_ratdivisor(b, RatDivisor(Divisor({p: 1}))) for p in b.places} == {
            loggm_from_ratdivisor(b, RatDivisor(Divisor({"p2": 1}))),
            loggm_zero(b),
        }


# ------------------------------------------------------------ properties

QB = base_qs5(["p2", "p3"])
PLACES = list(QB.places)

rational_on_support = st.fixed_dictionaries(
    {"p2": st.fractions(-3, 3, max_denominator=6), "p3": st.fractions(-3, 3, max_denominator=6)}
)
integral_divisor = st.fixed_dictionaries({p: st.integers(-3, 3) for p in PLACES})


def _same_class_oracle(E1, E2) -> bool:
    """Equal in DivRat/Divp iff the difference is integral and principal."""
    keys = set(E1) | set(E2)
    diff = {p: Fraction(E1.get(p, 0)) - Fraction(E2.get(p, 0)) for p in keys}
    if any(d.denominator != 1 for d in diff.values()):
        return False
    return class_of_divisor(QB, Divisor({p: int(d) for p, d in diff.items()})).is_zero()


@given(rational_on_support, integral_divisor, rational_on_support, integral_divisor)
def test_equality_matches_oracle(f1, d1, f2, d2):
    E1 = {p: f1.get(p, 0) + d1[p] for p in PLACES}
    E2 = {p: f2.get(p, 0) + d2[p] for p in PLACES}
    assert (loggm_from_rational(QB, E1) == loggm_from_rational(QB, E2)) == _same_class_oracle(E1, E2)


@given(rational_on_support, integral_divisor)
def test_principal_shift_invisible(f, d):
    if not class_of_divisor(QB, Divisor(d)).is_zero():
        d = dict(d, p2=d["p2"] + 1)
    z = QB.element(d)
    E = dict(f)
    shifted = {p: E.get(p, 0) + z.divisor[p] for p in PLACES}
    assert loggm_from_rational(QB, shifted) == loggm_from_rational(QB, E)


@given(rational_on_support, rational_on_support)
def test_add_matches_rational_sum(f, g):
    s = {p: f[p] + g[p] for p in f}
    assert loggm_add(loggm_from_rational(QB, f), loggm_from_rational(QB, g)) == loggm_from_rational(QB, s)


def test_group_laws_on_enumeration():
    b = base_qs5(["p2"])
    vals = [Fraction(a, d) for d in (1, 2, 3, 6) for a in range(d)]
    classes = {loggm_add(loggm_from_rational(b, {"p2": v}), loggm_from_rational(b, {"p3": k, "p3b": 1})) for v in vals for k in (0, 1)}
    for x, y, z in itertools.product(list(classes)[:8], repeat=3):
        assert loggm_add(loggm_add(x, y), z) == loggm_add(x, loggm_add(y, z))
        assert loggm_add(x, y) == loggm_add(y, x)
    for x in classes:
        assert loggm_add(x, -x).is_zero()


@given(st.integers(1, 6), st.fixed_dictionaries({"p2": st.integers(-6, 6), "p3": st.integers(-6, 6)}))
def test_torsion_compatibility(n, d):
    c = loggm_from_rational(QB, {p: Fraction(k, n) for p, k in d.items()})
    assert loggm_scale(c, n) == loggm_from_ratdivisor(QB, RatDivisor(Divisor(d)))
