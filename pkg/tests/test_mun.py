from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from logkummer import mun
from logkummer.dedekind import DedekindLogBase, Divisor, class_of_divisor, loggm_from_rational, loggm_scale
from logkummer.lattice import QmodZ

from conftest import base_qs5, base_z

half = QmodZ(Fraction(1, 2))


def dvr(v_support=True):
    return DedekindLogBase.create("R", [], {"t": []}, 0, 1, ["t"] if v_support else [])


def is_nth_power(b, n, x) -> bool:
    """x = w^n in K^*: div(x) = n E with E principal, then the unit x w^-n
    must be an n-th power of a unit (torsion part divisible by gcd(n, w),
    free part by n)."""
    E = {}
    for p, k in x.divisor.items():
        if k % n:
            return False
        E[p] = k // n
    if not class_of_divisor(b, Divisor(E)).is_zero():
        return False
    u = x * b.element(E) ** -n
    return u.torsion % gcd(n, b.unit_torsion) == 0 and all(e % n == 0 for e in u.free)


class TestMembership:
    def test_examples(self, zbase):
        z = zbase.element({"5": 1})
        mun.torsor_from_element(zbase, 2, z)
        bare = zbase.with_support([])
        with pytest.raises(mun.MembershipError) as exc:
            mun.torsor_from_element(bare, 2, bare.element({"5": 1}))
        assert exc.value.place == "5" and exc.value.valuation == 1

    @given(st.integers(1, 6), st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 1))
    def test_nth_powers_trivial(self, n, a, b, t):
        B = base_z()
        z = B.element({"2": a, "5": b}, t)
        assert mun.torsor_from_element(B, n, z ** n).is_trivial()


class TestInvariants:
    def test_dvr_rho(self):
        b = dvr()
        T = mun.torsor_from_element(b, 2, b.element({"t": 3}))
        assert mun.rho(T).frac_map() == {"t": half}
        assert mun.ramification_index(T, "t") == 2

    @pytest.mark.parametrize("v,n,e", [(3, 2, 2), (0, 5, 1), (2, 6, 3)])
    def test_ramification_examples(self, v, n, e):
        b = dvr()
        assert mun.ramification_index(mun.torsor_from_element(b, n, b.element({"t": v})), "t") == e

    def test_z_examples(self, zbase):
        T = mun.torsor_from_element(zbase, 2, zbase.element({"5": 1}))
        r = mun.rho(T)
        assert r.frac_map() == {"5": half} and r.picpart.is_zero()
        assert mun.nu(T) == {"5": half}
        assert not mun.is_fppf(T)
        b = zbase.with_support(["2", "5"])
        T50 = mun.torsor_from_element(b, 3, b.element({"2": 1, "5": 2}))
        assert mun.nu(T50) == {"2": QmodZ(Fraction(1, 3)), "5": QmodZ(Fraction(2, 3))}
        assert mun.is_fppf(mun.torsor_from_element(zbase, 2, zbase.element({"2": 2})))
        assert mun.pilog_of(T)[1] == loggm_from_rational(zbase, {"5": Fraction(1, 2)})
        assert mun.pilog_of(T)[0].is_zero()

    def test_units(self, zbase):
        one = mun.unit_to_torsor(zbase, 2, zbase.one())
        assert one.is_trivial()
        m1 = mun.unit_to_torsor(zbase, 2, zbase.unit(1))
        assert not m1.is_trivial() and mun.rho(m1).is_zero() and mun.is_fppf(m1)
        assert mun.unit_to_torsor(zbase, 3, zbase.unit(1)).is_trivial()
        with pytest.raises(ValueError):
            mun.unit_to_torsor(zbase, 2, zbase.element({"2": 1}))

    def test_qs5_two(self, qbase):
        T = mun.torsor_from_element(qbase, 2, qbase.element({"p2": 2}))
        p2 = qbase.pic((1,))
        assert mun.c_of(T) == p2
        assert mun.cl_of(T) == [qbase.pic.zero(), p2]
        assert all(q.is_zero() for q in mun.nu(T).values())
        assert mun.is_fppf(T)
        assert mun.rho(T).picpart == -mun.c_of(T)

    def test_qs5_c_zero(self):
        b = base_qs5(["p2", "p3"])
        T = mun.torsor_from_element(b, 2, b.element({"p2": 1, "p3": 1}))
        assert mun.c_of(T).is_zero()

    def test_cl_order_three(self):
        b = DedekindLogBase.create("C3", [3], {"a": [1], "b": [2]}, 0, 2, [])
        T = mun.torsor_from_element(b, 3, b.element({"a": 3}))
        cl = mun.cl_of(T)
        assert len(set(cl)) == 3

    def test_cl_not_additive(self):
        b = base_qs5(["p2", "p3", "p3b"])
        z, w = b.element({"p2": 1, "p3": 1}), b.element({"p2": 1, "p3b": 1})
        Tz, Tw, Tzw = (mun.torsor_from_element(b, 2, x) for x in (z, w, z * w))
        summed = [x + y for x, y in zip(mun.cl_of(Tz), mun.cl_of(Tw))]
        assert mun.cl_of(Tzw) != summed

    def test_theta(self, qbase, zbase):
        b = base_qs5(["p2"])
        assert mun.theta(b, 2, {}).is_zero()
        assert not mun.theta(b, 2, {"p2": half}).is_zero()
        assert mun.theta(zbase, 2, {"5": half}).is_zero()
        with pytest.raises(ValueError):
            mun.theta(b, 2, {"p2": QmodZ(Fraction(1, 3))})

    def test_class_equality_uses_pic(self, qbase):
        # every valuation of 2 is even, yet 2 is not a square: p2 is not principal
        two = qbase.element({"p2": 2})
        assert not is_nth_power(qbase, 2, two)
        assert not mun.torsor_from_element(qbase, 2, two).is_trivial()
        assert mun.torsor_from_element(qbase, 2, two ** 2).is_trivial()


class TestAudits:
    def test_z(self, zbase):
        rep = mun.audit_mun_sequence(zbase, 2, ["2", "3", "5"])
        assert rep.passed, rep.lines()

    def test_empty_support(self, zbase):
        b = zbase.with_support([])
        rep = mun.audit_mun_sequence(b, 2, ["2", "3", "5"])
        assert rep.passed
        assert all(mun.is_fppf(T) for T in mun.enumerate_torsors(b, 2, ["2", "3", "5"]))

    @pytest.mark.parametrize("support", [["p2"], ["p2", "p3", "p3b"]])
    @pytest.mark.parametrize("n", [2, 3])
    def test_qs5(self, support, n):
        b = base_qs5(support)
        assert mun.audit_mun_sequence(b, n, ["p2", "p3", "p3b", "p5"]).passed

    def test_qs5_image_of_nu(self):
        b = base_qs5(["p2"])
        images = {tuple(mun.nu(T).values()) for T in mun.enumerate_torsors(b, 2, ["p2", "p3", "p3b", "p5"])}
        assert images == {(QmodZ(0),)}


class TestRac:
    def test_neutral_identity(self, qbase):
        e = mun.rac_neutral(qbase, 2)
        r = mun.rac_make(qbase, 2, {"p2": 1}, qbase.one())
        assert mun.rac_eq(mun.rac_mul(e, r), r)
        assert mun.rac_to_torsor(e).is_trivial()

    def test_constraints(self, qbase):
        with pytest.raises(mun.RacError) as exc:
            mun.rac_make(qbase, 2, {"p2": -1}, qbase.one())
        assert exc.value.negative == {"p2": -2}
        with pytest.raises(mun.RacError) as exc:
            mun.rac_make(qbase, 2, {"p5": 1}, qbase.one())
        assert exc.value.off_support == {"p5": 2}

    def test_principal_type_is_neutral(self, qbase):
        h = qbase.element({"p3": 1, "p3b": 1})
        r = mun.rac_make(qbase, 2, -h.divisor, h ** 2)
        assert r.branch_divisor.is_zero()
        assert mun.rac_eq(r, mun.rac_neutral(qbase, 2))

    def test_kernel_witness(self, qbase):
        w = mun.kernel_witness(qbase, 2)
        assert w.I == Divisor({"p2": 1}) and w.z.is_one()
        assert not mun.rac_eq(w, mun.rac_neutral(qbase, 2))
        assert mun.rac_to_torsor(w).is_trivial()

    def test_branch_divisor_is_invariant(self, qbase):
        # (-[p2], 2) has zero branch divisor but a nontrivial torsor
        r = mun.rac_make(qbase, 2, {"p2": -1}, qbase.element({"p2": 2}))
        assert r.branch_divisor.is_zero()
        assert not mun.rac_to_torsor(r).is_trivial()
        assert not mun.rac_eq(r, mun.rac_neutral(qbase, 2))

    def test_torsor_branch(self, qbase):
        r = mun.rac_make(qbase, 2, {"p2": 1, "p3": 1}, qbase.element({"p2": -1, "p3": -1}))
        nu = mun.nu(mun.rac_to_torsor(r))
        assert {p: QmodZ(Fraction(r.branch_divisor[p], 2)) for p in qbase.support} == nu


# ------------------------------------------------------------ properties

QB = base_qs5(["p2", "p3", "p3b"])
PLACES = ["p2", "p3", "p3b", "p5"]


@st.composite
def kummer_elements(draw, n=None):
    n = n or draw(st.integers(1, 6))
    div = {p: draw(st.integers(-4, 4)) for p in ("p2", "p3", "p3b")}
    div["p5"] = n * draw(st.integers(-1, 1))
    if not class_of_divisor(QB, Divisor(div)).is_zero():
        div["p2"] += 1
    return n, QB.element(div, draw(st.integers(0, 1)))


@st.composite
def rac_elements(draw, n=None):
    n = n or draw(st.integers(1, 4))
    _, z = draw(kummer_elements(n))
    I = {p: -(z.divisor[p] // n) + draw(st.integers(0, 1)) for p in ("p2", "p3", "p3b")}
    I["p5"] = -(z.divisor["p5"] // n)
    return mun.rac_make(QB, n, I, z)


@given(kummer_elements())
def test_rho_is_n_torsion(nz):
    n, z = nz
    assert loggm_scale(mun.rho(mun.torsor_from_element(QB, n, z)), n).is_zero()


@given(kummer_elements())
def test_fppf_iff_unramified(nz):
    n, z = nz
    T = mun.torsor_from_element(QB, n, z)
    unram = all(mun.ramification_index(T, p) == 1 for p in QB.support)
    assert mun.is_fppf(T) == all(q.is_zero() for q in mun.nu(T).values()) == unram


@given(kummer_elements())
def test_pilog_tuple_law(nz):
    n, z = nz
    g = mun.galois_structure(mun.torsor_from_element(QB, n, z))
    assert g.cl_tuple[0].is_zero() and g.pilog_tuple[0].is_zero()
    assert len(g.pilog_tuple) == len(g.cl_tuple) == n
    for k in range(1, n):
        assert g.pilog_tuple[k] == loggm_scale(g.pilog_tuple[1], k)
        assert g.cl_tuple[k] == k * g.cl_tuple[1]


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(kummer_elements(n), kummer_elements(n))))
def test_class_equality_matches_oracle(pair):
    (n, z), (_, w) = pair
    same = mun.torsor_from_element(QB, n, z) == mun.torsor_from_element(QB, n, w)
    assert same == is_nth_power(QB, n, z / w)


@given(rac_elements())
def test_omega_squares(r):
    assert mun.rho(mun.rac_to_torsor(r)) == mun.rac_forget(r)
    for a in mun.unit_representatives(QB, r.n):
        assert mun.rac_to_torsor(mun.rac_of_unit(QB, r.n, a)) == mun.unit_to_torsor(QB, r.n, a)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(rac_elements(n), rac_elements(n), rac_elements(n))))
def test_rac_monoid_laws(triple):
    x, y, z = triple
    assert mun.rac_eq(mun.rac_mul(x, y), mun.rac_mul(y, x))
    assert mun.rac_eq(mun.rac_mul(mun.rac_mul(x, y), z), mun.rac_mul(x, mun.rac_mul(y, z)))
    assert mun.rac_eq(x, x)
    if mun.rac_eq(x, y):
        assert mun.rac_eq(y, x)
        assert mun.rac_eq(mun.rac_mul(x, z), mun.rac_mul(y, z))
        if mun.rac_eq(y, z):
            assert mun.rac_eq(x, z)
