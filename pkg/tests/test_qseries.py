import pytest
import sympy
from hypothesis import given, settings, strategies as st

from mod2hecke import qseries as qs
from mod2hecke.errors import DomainError
from mod2hecke.quadlattice import class_group, odd_characters, representation_count, principal_form
from mod2hecke.rings import F2, BinaryField, GroupRing, Integers

ZZ = Integers()


def nontrivial(G):
    return [d for d in odd_characters(G) if not d.is_trivial]


def test_series_arithmetic_basics():
    v = qs.series(ZZ, [3, 1, 4, 1, 5])
    assert qs.mul(qs.one(ZZ, 5), v) == v
    q = qs.q(ZZ, 5)
    assert qs.mul(q, q).coeffs == [0, 0, 1, 0, 0]
    one_q = qs.series(F2, [1, 1, 0, 0])
    assert qs.mul(one_q, one_q).coeffs == [1, 0, 1, 0]
    assert qs.mul(v, qs.one(ZZ, 3)).prec == 3
    with pytest.raises(DomainError):
        qs.add(v, one_q)
    with pytest.raises(IndexError):
        v[5]


def test_theta_examples():
    t = qs.theta_form(17)
    assert t.prec == 19
    assert t[0] == 1 and t[1] == 2 and t[2] == 0 and t[4] == 2
    assert t[17] == 2 and t[18] == 4
    assert t.coeffs == [representation_count(principal_form(-68), m) if m else 1 for m in range(19)]
    m = qs.theta_form(23, "MinusN", 30)
    assert m.coeffs == [representation_count(principal_form(-23), k) if k else 1 for k in range(30)]
    with pytest.raises(DomainError):
        qs.theta_form(17, "MinusN")


@pytest.mark.parametrize("N", list(sympy.primerange(3, 200)))
def test_theta_is_one_mod_2(N):
    flavors = ["FourN"] + (["MinusN"] if N % 4 == 3 else [])
    for fl in flavors:
        t = qs.reduce_mod2(qs.theta_form(N, fl, 3 * N))
        assert t.coeffs == [1] + [0] * (3 * N - 1)


def test_eisenstein_examples():
    E1 = qs.eisenstein_chi4N(17, 40)
    # stored doubled: a(0) = h(-68) = 2 * 2, a(1) = a(2) = 2 * 1
    assert E1[0] == 4 and E1[1] == 2 and E1[2] == 2
    E2 = qs.eisenstein_chiN_chi4(17, 40)
    assert E2[0] == 0 and E2[1] == 1
    assert E2[2] == 1  # (2|17) = 1
    assert qs.eisenstein_chiN_chi4(13, 5)[2] == -1  # (2|13) = -1


def test_dihedral_disc_minus_23():
    G = class_group(-23)
    (d,) = nontrivial(G)
    K = d.field
    assert K.degree == 2
    f = qs.dihedral_form(G, d, 101)
    assert f[1] == 1
    assert f[2] == 1  # omega + omega^2
    assert f[23] == 1
    triv = odd_characters(G)[0]
    assert triv.is_trivial
    ft = qs.dihedral_form(G, triv, 60)
    assert ft[1] == 1 and ft[2] == 0
    # T2 f = a(2) f to precision 50 (chi_{-23}(2) = 1)
    Tf = qs.hecke_Tp_on_qexp(f, 2, 1, 23, out_prec=50)
    assert Tf == qs.scale(f.truncate(50), f[2])


@pytest.mark.parametrize("D", [-23, -47, -71, -356, -404, -1604, -4 * 73, -4 * 113])
def test_dihedral_forms_are_eigenforms(D):
    G = class_group(D)
    N = -D if D % 4 else -D // 4
    prec = 20 * 40 + 1
    for d in odd_characters(G):
        f = qs.dihedral_form(G, d, prec)
        K = f.ring
        assert f[N] == 1
        for p in sympy.primerange(3, 21):
            if D % p == 0:
                continue
            Tf = qs.hecke_Tp_on_qexp(f, p, 1, -D, out_prec=40)
            assert Tf == qs.scale(f.truncate(40), f[p])


def test_hecke_operator_rules():
    z = qs.series(ZZ, [0] * 30)
    assert qs.hecke_Tp_on_qexp(z, 3, 2, 11).coeffs == [0] * 10
    u = qs.series(ZZ, list(range(21)))
    assert qs.U2(u).coeffs == list(range(0, 21, 2))
    assert qs.U2(qs.U2(u)) == qs.hecke_Tp_on_qexp(qs.U2(u), 2, 2, 4)
    with pytest.raises(DomainError):
        qs.hecke_Tp_on_qexp(u, 3, 2, 11, out_prec=10)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 15), min_size=1, max_size=40))
def test_frobenius_square(coeffs):
    K = BinaryField.standard(4)
    u = qs.series(K, coeffs)
    s = qs.mul(u, u)
    for m in range(s.prec):
        assert s[m] == (K.mul(u[m // 2], u[m // 2]) if m % 2 == 0 else 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=30),
       st.lists(st.integers(-50, 50), min_size=1, max_size=30))
def test_product_precision_and_commutativity(a, b):
    u, v = qs.series(ZZ, a), qs.series(ZZ, b)
    assert qs.mul(u, v).prec == min(len(a), len(b))
    assert qs.mul(u, v) == qs.mul(v, u)
    assert qs.reduce_mod2(qs.mul(u, v)) == qs.mul(qs.reduce_mod2(u), qs.reduce_mod2(v))


@pytest.mark.parametrize("D", [-356, -1604, -4 * 73, -4 * 113, -4 * 257])
def test_group_ring_specializes_to_dihedral(D):
    G = class_group(D)
    for d in odd_characters(G):
        f = qs.group_ring_form(G, d, 300)
        assert f.ring.size == 2 ** G.e
        assert qs.specialize_x_to_one(f) == qs.dihedral_form(G, d, 300)
        for p in sympy.primerange(3, 300):
            if sympy.legendre_symbol(D % p, p) == -1:
                assert f.ring.is_zero(f[p])


def test_group_ring_form_e0_is_dihedral():
    G = class_group(-23)
    assert G.e == 0
    (d,) = nontrivial(G)
    f = qs.group_ring_form(G, d, 50)
    assert qs.specialize_x_to_one(f) == qs.dihedral_form(G, d, 50)
    with pytest.raises(DomainError):
        qs.two_part_log(class_group(-420))  # (Z/2)^3


@pytest.mark.parametrize("D", [-356, -1604])
def test_image_filling(D):
    G = class_group(D)
    for d in nontrivial(G):
        f = qs.group_ring_form(G, d, 600)
        dim, full = qs.image_filling(f)
        assert dim == full


def test_span_closure_small():
    R = GroupRing(2)
    assert qs.span_closure(R, []) == 1
    assert qs.span_closure(R, [R.x_power(2)]) == 2
    assert qs.span_closure(R, [R.x_power(1)]) == 4


@pytest.mark.parametrize("N", [17, 41])
def test_character_sum_identity(N):
    ok, bad, det = qs.character_sum_identity_check(N, 200)
    assert ok and bad is None
    assert det["characters"] == class_group(-4 * N).h
    with pytest.raises(DomainError):
        qs.character_sum_identity_check(13)


def test_to_json_round_trip_fields():
    G = class_group(-23)
    (d,) = nontrivial(G)
    j = qs.dihedral_form(G, d, 10).to_json()
    assert j["prec"] == 10 and len(j["coeffs"]) == 10
