import pytest
from hypothesis import given, settings, strategies as st

from mod2hecke.errors import DomainError
from mod2hecke.rings import (
    F2,
    BinaryField,
    GroupRing,
    Integers,
    IntegersMod,
    clmul,
    cyclotomic_factor,
    cyclotomic_field,
    cyclotomic_int,
    is_irreducible,
    least_irreducible,
    multiplicative_order,
    pdivmod,
    reduce_cyclotomic,
)

F16 = BinaryField.standard(4)
GR2 = GroupRing(2, BinaryField.standard(2))

RINGS = {
    "ZZ": (Integers(), st.integers(-10**6, 10**6)),
    "Z/8": (IntegersMod(3), st.integers(0, 7)),
    "F16": (F16, st.integers(0, 15)),
    "GF4[x]/(x^4-1)": (GR2, st.tuples(*[st.integers(0, 3)] * 4)),
}


@pytest.mark.parametrize("name", list(RINGS))
@settings(max_examples=1000, deadline=None)
@given(data=st.data())
def test_ring_axioms(name, data):
    R, elt = RINGS[name]
    a, b, c = data.draw(elt), data.draw(elt), data.draw(elt)
    assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))
    assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
    assert R.add(a, b) == R.add(b, a)
    assert R.mul(a, b) == R.mul(b, a)
    assert R.mul(R.one(), a) == a
    assert R.is_zero(R.add(a, R.neg(a)))


@given(st.integers(1, 2**20), st.integers(1, 2**20))
def test_polynomial_division(a, m):
    q, r = pdivmod(a, m)
    assert clmul(q, m) ^ r == a
    assert r.bit_length() < m.bit_length()


def test_least_irreducible_small_degrees():
    # x^2+x+1, x^3+x+1, x^4+x+1
    assert least_irreducible(2) == 0b111
    assert least_irreducible(3) == 0b1011
    assert least_irreducible(4) == 0b10011


def test_irreducible_count_degree_5():
    # number of irreducible quintics over F2 is (2^5 - 2)/5 = 6
    assert sum(is_irreducible(f) for f in range(32, 64)) == 6


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 13, 15, 21])
def test_cyclotomic_field_root_order(n):
    K = cyclotomic_field(n)
    assert K.degree == multiplicative_order(2, n)
    z = K.zeta
    assert K.pow(z, n) == 1
    for d in range(1, n):
        if n % d == 0:
            assert K.pow(z, d) != 1


def test_cyclotomic_factor_divides_phi():
    # Phi_7 = x^6+...+1 mod 2 factors as (x^3+x+1)(x^3+x^2+1); least is x^3+x+1
    assert cyclotomic_factor(7) == 0b1011
    with pytest.raises(DomainError):
        cyclotomic_factor(4)


def test_field_inverse_and_frobenius():
    for a in range(1, 16):
        assert F16.mul(a, F16.inv(a)) == 1
    # Frobenius has order 4 on F16
    for a in range(16):
        x = a
        for _ in range(4):
            x = F16.frobenius(x)
        assert x == a


def test_group_ring_is_cyclic_convolution():
    R = GroupRing(3)
    x = R.x_power(1)
    p = R.one()
    for _ in range(8):
        p = R.mul(p, x)
    assert p == R.one()
    # (1 + x)^8 = 1 + x^8 = 0 in F2[x]/(x^8 - 1)
    y = R.add(R.one(), x)
    p = R.one()
    for _ in range(8):
        p = R.mul(p, y)
    assert R.is_zero(p)
    assert R.specialize_one(R.add(R.x_power(3), R.x_power(5))) == 0


def test_integer_cyclotomic_polynomials():
    assert cyclotomic_int(1) == (-1, 1)
    assert cyclotomic_int(3) == (1, 1, 1)
    assert cyclotomic_int(6) == (1, -1, 1)
    # 1 + z + z^2 = 0 for a primitive cube root
    assert reduce_cyclotomic([1, 1, 1], 3) == (0, 0)
    assert reduce_cyclotomic([0, 0, 1], 3) == (-1, -1)


def test_bad_moduli():
    with pytest.raises(DomainError):
        BinaryField(0b101)  # x^2 + 1 = (x + 1)^2
    with pytest.raises(DomainError):
        IntegersMod(0)
    assert F2.order == 2
