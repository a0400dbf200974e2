import pytest
import sympy
from hypothesis import given, settings, strategies as st

from mod2hecke.errors import DomainError
from mod2hecke.localalg import (
    F2Span,
    FiniteCommAlgebra,
    algebra_from_table,
    decompose_local,
    kernel_of,
    nilpotent_generator_structure,
    span_of,
    subalgebra_membership,
)
from mod2hecke.rings import clmul, pdivmod

X = sympy.Symbol("x")


def monogenic(f):
    """F2[x]/(f) with basis 1, x, ..., x^(d-1); f is a bitmask polynomial."""
    d = f.bit_length() - 1

    def vec(p):
        r = pdivmod(p, f)[1]
        return [(r >> i) & 1 for i in range(d)]

    struct = [[vec(clmul(1 << i, 1 << j)) for j in range(d)] for i in range(d)]
    A = algebra_from_table(struct, unit=vec(1))
    A.named = {"x": vec(2), 1: vec(1)}
    return A


def factor_degrees(f):
    """Sorted (multiplicity * degree, degree) of the irreducible factors over F2."""
    d = f.bit_length() - 1
    poly = sympy.Poly([(f >> i) & 1 for i in range(d, -1, -1)], X, modulus=2)
    return sorted((k * fac.degree(), fac.degree()) for fac, k in poly.factor_list()[1])


def test_f4():
    A = monogenic(0b111)
    (f,) = decompose_local(A)
    assert (f.dim, f.residue_degree, f.rad_dim) == (2, 2, 0)
    assert nilpotent_generator_structure(A) is None


def test_dual_numbers():
    A = monogenic(0b100)  # x^2
    (f,) = decompose_local(A)
    assert (f.dim, f.residue_degree, f.rad_dim) == (2, 1, 1)
    assert nilpotent_generator_structure(A) == 2
    assert A.is_nilpotent(A.elem("x"))


def test_f2_times_f2():
    A = monogenic(0b110)  # x(x + 1)
    fs = decompose_local(A)
    assert sorted((f.dim, f.residue_degree) for f in fs) == [(1, 1), (1, 1)]
    assert fs[0].idempotent ^ fs[1].idempotent == A.one
    assert A.mul(fs[0].idempotent, fs[1].idempotent) == 0
    for f in fs:
        assert nilpotent_generator_structure(A, f.idempotent) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_truncated_polynomial_rings(n):
    assert nilpotent_generator_structure(monogenic(1 << n)) == n


def test_non_monogenic_local_algebra():
    # F2[x, y]/(x, y)^2 with basis 1, x, y
    z = [0, 0, 0]
    struct = [[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
              [[0, 1, 0], z, z],
              [[0, 0, 1], z, z]]
    A = algebra_from_table(struct)
    assert list(A.unit_vec) == [1, 0, 0]
    assert len(A.radical()) == 2
    assert nilpotent_generator_structure(A) is None


def test_noncommutative_rejected():
    # 2x2 upper triangular matrices: e11, e12, e22
    z = [0, 0, 0]
    struct = [[[1, 0, 0], [0, 1, 0], z],
              [z, z, [0, 1, 0]],
              [z, z, [0, 0, 1]]]
    A = FiniteCommAlgebra(3, struct, unit=[1, 0, 1])
    assert not A.check_commutative()
    with pytest.raises(DomainError):
        decompose_local(A)


def test_membership_over_z4():
    # Z/4[x]/(x^2), basis 1, x
    struct = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    A = FiniteCommAlgebra(2, struct, modulus=4, unit=[1, 0],
                          named={"x": [0, 1], "2x": [0, 2], "3x": [0, 3], 1: [1, 0]})
    assert subalgebra_membership(A, ["3x"], "x")
    assert subalgebra_membership(A, ["x"], "2x")
    assert not subalgebra_membership(A, ["2x"], "x")
    assert subalgebra_membership(A, [], [3, 0])


def test_membership_over_f2():
    A = monogenic(0b1011 * 0b100)  # (x^3 + x + 1) x^2
    assert subalgebra_membership(A, ["x"], [1, 1, 0, 1, 0])
    assert not subalgebra_membership(A, [], "x")


def test_span_and_kernel():
    s = F2Span()
    assert s.add(0b101) and s.add(0b011) and not s.add(0b110)
    assert s.contains(0b110) and not s.contains(0b001)
    assert len(span_of([1, 2, 3, 4]).basis()) == 3
    # kernel of the parity map on F2^3 has dimension 2
    assert len(kernel_of([1, 2, 4], lambda v: bin(v).count("1") & 1)) == 2


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 2 ** 11 - 1))
def test_decomposition_matches_factorization(f):
    if f.bit_length() < 2:
        return
    A = monogenic(f)
    fs = decompose_local(A)
    assert sorted((x.dim, x.residue_degree) for x in fs) == factor_degrees(f)
    assert sum(x.dim for x in fs) == A.dim
    total = 0
    for x in fs:
        assert A.mul(x.idempotent, x.idempotent) == x.idempotent
        total ^= x.idempotent
    assert total == A.one
    for x in fs:
        n = nilpotent_generator_structure(A, x.idempotent)
        assert (n == x.dim) if x.residue_degree == 1 else n is None
