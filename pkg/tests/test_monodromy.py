import itertools
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from logkummer.lattice import FiniteAbelianGroup, QmodZ, qmodz_order
from logkummer.monodromy import (
    DivisionProblem,
    MonodromyData,
    PairingError,
    obstruction,
    pair,
    predict_fppf,
    predict_ramification,
    subgroup_elements,
)


def cyclic_data(n, q):
    G = FiniteAbelianGroup.cyclic(n)
    return MonodromyData(G, G, ((QmodZ(q),),))


def test_examples():
    d = cyclic_data(2, Fraction(1, 2))
    x, y = d.phi((1,)), d.phi_prime((1,))
    assert pair(d, x, y) == QmodZ(Fraction(1, 2))
    assert pair(d, d.phi.zero(), y).is_zero()
    d4 = cyclic_data(4, Fraction(1, 4))
    assert pair(d4, d4.phi((2,)), d4.phi_prime((3,))) == QmodZ(Fraction(1, 2))


def test_predictions():
    d = cyclic_data(2, Fraction(1, 2))
    x, y = d.phi((1,)), d.phi_prime((1,))
    assert not predict_fppf(DivisionProblem(d, (x,), y))
    assert predict_fppf(DivisionProblem(d, (x,), d.phi_prime.zero()))
    assert predict_fppf(DivisionProblem(d, (), y))
    assert predict_ramification(d, x, y) == 2
    assert predict_ramification(d, x, d.phi_prime.zero()) == 1
    d4 = cyclic_data(4, Fraction(1, 4))
    assert predict_ramification(d4, d4.phi((1,)), d4.phi_prime((3,))) == 4
    assert obstruction(DivisionProblem(d, (x,), y)) == [(x, QmodZ(Fraction(1, 2)))]


def test_inconsistent_tables_rejected():
    G = FiniteAbelianGroup.cyclic(2)
    with pytest.raises(PairingError):
        MonodromyData(G, G, ((QmodZ(Fraction(1, 3)),),))
    with pytest.raises(PairingError):
        MonodromyData(G, G, ((QmodZ(0), QmodZ(0)),))


def test_wrong_parent():
    d = cyclic_data(2, Fraction(1, 2))
    other = FiniteAbelianGroup.cyclic(3)
    with pytest.raises(PairingError):
        pair(d, other((1,)), d.phi_prime((1,)))


@st.composite
def pairings(draw):
    phi = FiniteAbelianGroup.from_orders(draw(st.lists(st.integers(2, 6), min_size=1, max_size=2)))
    psi = FiniteAbelianGroup.from_orders(draw(st.lists(st.integers(2, 6), min_size=1, max_size=2)))
    table = []
    for d in phi.invariant_factors:
        row = []
        for e in psi.invariant_factors:
            g = gcd(d, e)
            row.append(QmodZ(Fraction(draw(st.integers(0, g - 1)), g)))
        table.append(tuple(row))
    return MonodromyData(phi, psi, tuple(table))


def _brute_pair(d, x, y):
    """Expand x and y as sums of generators and add table entries one by one."""
    total = QmodZ(0)
    xs = [i for i, c in enumerate(x.coords) for _ in range(c)]
    ys = [j for j, c in enumerate(y.coords) for _ in range(c)]
    for i, j in itertools.product(xs, ys):
        total = total + d.table[i][j]
    return total


@given(pairings(), st.data())
def test_bilinear_and_brute_force(d, data):
    el = lambda G: st.tuples(*[st.integers(0, 30)] * G.ngens).map(G)
    x1, x2 = data.draw(el(d.phi)), data.draw(el(d.phi))
    y = data.draw(el(d.phi_prime))
    assert pair(d, x1 + x2, y) == pair(d, x1, y) + pair(d, x2, y)
    assert pair(d, x1, y) == _brute_pair(d, x1, y)


@given(pairings(), st.data())
def test_consistency(d, data):
    el = lambda G: st.tuples(*[st.integers(0, 30)] * G.ngens).map(G)
    x, y, g = data.draw(el(d.phi)), data.draw(el(d.phi_prime)), data.draw(el(d.phi))
    e = predict_ramification(d, x, y)
    assert e == qmodz_order(pair(d, x, y))
    assert (e == 1) == pair(d, x, y).is_zero() == predict_fppf(DivisionProblem(d, (x,), y))
    # enlarging the image of G can only destroy fppf-ness
    if not predict_fppf(DivisionProblem(d, (x,), y)):
        assert not predict_fppf(DivisionProblem(d, (x, g), y))
    # orthogonality to generators is orthogonality to the whole subgroup
    H = subgroup_elements([x, g], d.phi)
    assert predict_fppf(DivisionProblem(d, (x, g), y)) == all(pair(d, h, y).is_zero() for h in H)
