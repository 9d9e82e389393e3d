import itertools
import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from logkummer.lattice import (
    FiniteAbelianGroup,
    IntMatrix,
    QmodZ,
    cokernel,
    element_order,
    image_basis,
    kernel_basis,
    qmodz_order,
    smith_normal_form,
    solve_integer,
)


def _minors_gcd(A: IntMatrix, k: int) -> int:
    """gcd of all k x k minors: the k-th determinantal divisor."""
    g = 0
    for rows in itertools.combinations(range(A.nrows), k):
        for cols in itertools.combinations(range(A.ncols), k):
            g = gcd(g, IntMatrix([[A[i, j] for j in cols] for i in rows]).det())
    return g


def _check_snf(A: IntMatrix):
    s = smith_normal_form(A)
    assert s.U @ A @ s.V == s.D
    assert abs(s.U.det()) == 1 and abs(s.V.det()) == 1
    assert s.U @ s.U_inv == IntMatrix.identity(A.nrows)
    assert s.V @ s.V_inv == IntMatrix.identity(A.ncols)
    d = s.diagonal
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b % a == 0) if a else b == 0
    for i in range(A.nrows):
        for j in range(A.ncols):
            if i != j:
                assert s.D[i, j] == 0
    return s


matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-10, 10), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


class TestSmithNormalForm:
    def test_identity(self):
        s = _check_snf(IntMatrix.identity(3))
        assert s.diagonal == [1, 1, 1]

    def test_diag_2_3(self):
        assert _check_snf(IntMatrix([[2, 0], [0, 3]])).diagonal == [1, 6]

    def test_2468(self):
        # d1 = gcd of entries = 2, d1*d2 = |det| = 8
        assert _check_snf(IntMatrix([[2, 4], [6, 8]])).diagonal == [2, 4]

    def test_classic_3x3(self):
        A = IntMatrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
        assert _check_snf(A).diagonal == [2, 6, 12]

    def test_zero_and_rectangular(self):
        assert _check_snf(IntMatrix.zeros(2, 3)).rank == 0
        assert _check_snf(IntMatrix([[1, 1]])).diagonal == [1]

    @given(matrices)
    def test_determinantal_divisors(self, rows):
        A = IntMatrix(rows)
        s = _check_snf(A)
        prod = 1
        for k, d in enumerate(s.diagonal, start=1):
            prod *= d
            assert prod == _minors_gcd(A, k)

    def test_big_entries(self):
        A = IntMatrix([[10**30 + 1, 2], [3, 10**25]])
        _check_snf(A)


class TestCokernel:
    def test_mult_by_n(self):
        G, r = cokernel(IntMatrix([[7]]))
        assert G.invariant_factors == (7,) and r == 0

    def test_diagonal_embedding(self):
        G, r = cokernel(IntMatrix([[1], [1]]))
        assert G.order == 1 and r == 1

    @pytest.mark.parametrize("n,r", [(2, 1), (3, 2), (4, 3)])
    def test_scaled_identity(self, n, r):
        G, f = cokernel(IntMatrix.identity(r).scale(n))
        assert G.invariant_factors == (n,) * r and f == 0

    @given(matrices, st.randoms(use_true_random=False))
    def test_invariant_under_unimodular_scrambling(self, rows, rnd):
        A = IntMatrix(rows)

        def unimodular(k):
            M = IntMatrix.identity(k)
            for _ in range(6):
                i, j = rnd.randrange(k), rnd.randrange(k)
                if i != j:
                    E = [list(r) for r in IntMatrix.identity(k).rows]
                    E[i][j] = rnd.randint(-3, 3)
                    M = M @ IntMatrix(E)
            return M

        B = unimodular(A.nrows) @ A @ unimodular(A.ncols)
        assert cokernel(A) == cokernel(B)

    def test_kernel_image_solve(self):
        A = IntMatrix([[1, 2, 3], [2, 4, 6]])
        for k in kernel_basis(A):
            assert A.apply(k) == (0, 0)
        assert len(kernel_basis(A)) == 2
        assert len(image_basis(A)) == 1
        assert solve_integer(A, (2, 4)) is not None
        assert solve_integer(A, (1, 1)) is None
        assert solve_integer(IntMatrix([[2]]), (3,)) is None


class TestFiniteAbelianGroup:
    def test_validation(self):
        with pytest.raises(ValueError):
            FiniteAbelianGroup((2, 3))
        with pytest.raises(ValueError):
            FiniteAbelianGroup((1,))
        assert FiniteAbelianGroup.from_orders([2, 3]).invariant_factors == (6,)
        assert FiniteAbelianGroup.from_orders([4, 6]).invariant_factors == (2, 12)

    def test_orders(self):
        G = FiniteAbelianGroup((6,))
        assert element_order(G.zero()) == 1
        assert element_order(G((1,))) == 6
        H = FiniteAbelianGroup((4, 12))
        assert element_order(H((2, 3))) == 4

    def test_elements_and_quotient(self):
        G = FiniteAbelianGroup((2, 4))
        assert len(set(G.elements())) == 8
        Q, proj = G.quotient_by_multiples(2)
        assert Q.invariant_factors == (2, 2)
        assert proj(G((1, 3))) == Q((1, 1))
        Q3, _ = G.quotient_by_multiples(3)
        assert Q3.order == 1

    @given(st.lists(st.integers(2, 12), max_size=3), st.data())
    def test_element_order_minimal(self, orders, data):
        G = FiniteAbelianGroup.from_orders(orders)
        g = G(tuple(data.draw(st.integers(0, 50)) for _ in range(G.ngens)))
        k = element_order(g)
        assert (k * g).is_zero()
        for p in range(2, k + 1):
            if k % p == 0 and all(p % q for q in range(2, p)):
                assert not ((k // p) * g).is_zero()

    @given(st.lists(st.integers(2, 8), max_size=3), st.data())
    def test_group_laws(self, orders, data):
        G = FiniteAbelianGroup.from_orders(orders)
        el = st.tuples(*[st.integers(-20, 20)] * G.ngens).map(G)
        a, b, c = data.draw(el), data.draw(el), data.draw(el)
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a - a).is_zero() and a + G.zero() == a


class TestQmodZ:
    def test_canonical(self):
        assert QmodZ(Fraction(4, 6)) == QmodZ(Fraction(2, 3))
        assert QmodZ(Fraction(-1, 2)) == QmodZ(Fraction(1, 2))
        assert QmodZ(3, 2).value == Fraction(1, 2)
        assert str(QmodZ(Fraction(5, 4))) == "1/4"

    def test_orders(self):
        assert qmodz_order(QmodZ(0)) == 1
        assert qmodz_order(QmodZ(Fraction(1, 2))) == 2
        assert qmodz_order(QmodZ(Fraction(4, 6))) == 3

    @given(st.fractions(), st.fractions())
    def test_group_law(self, a, b):
        x, y = QmodZ(a), QmodZ(b)
        assert x + y == QmodZ(a + b)
        assert (x - y) + y == x
        assert 0 <= (x + y).value < 1
        assert QmodZ.parse(str(x)) == x


def test_snf_random_batch_is_fast():
    rng = random.Random(11)
    for _ in range(200):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        _check_snf(IntMatrix([[rng.randint(-10, 10) for _ in range(n)] for _ in range(m)]))
