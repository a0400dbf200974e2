"""Truncated q-expansions over small coefficient rings, and the explicit
weight-1 forms attached to Q(sqrt(-N)): theta series, the two Eisenstein
series, dihedral forms f_delta and the group-ring form."""

from dataclasses import dataclass, field
from math import gcd

from .errors import DomainError, InternalError
from .quadlattice import (
    all_characters,
    class_group,
    kronecker,
    principal_form,
    representation_numbers,
    units_count,
)
from .rings import F2, GroupRing, Integers, reduce_cyclotomic

ZZ = Integers()


@dataclass
class QExpansion:
    ring: object
    coeffs: list
    meta: dict = field(default_factory=dict)

    @property
    def prec(self):
        return len(self.coeffs)

    def __getitem__(self, m):
        if m >= self.prec:
            raise IndexError(f"coefficient {m} beyond precision {self.prec}")
        return self.coeffs[m]

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __eq__(self, other):
        return (isinstance(other, QExpansion) and self.ring == other.ring
                and self.coeffs == other.coeffs)

    def truncate(self, prec):
        return QExpansion(self.ring, self.coeffs[:prec], dict(self.meta))

    def map(self, ring, f):
        return QExpansion(ring, [f(c) for c in self.coeffs], dict(self.meta))

    def to_json(self):
        return {"ring": repr(self.ring), "prec": self.prec, "meta": self.meta,
                "coeffs": [self.ring.to_json(c) for c in self.coeffs]}


def series(ring, coeffs, **meta):
    return QExpansion(ring, list(coeffs), meta)


def one(ring, prec):
    return series(ring, [ring.one()] + [ring.zero()] * (prec - 1))


def q(ring, prec):
    c = [ring.zero()] * prec
    if prec > 1:
        c[1] = ring.one()
    return series(ring, c)


def _check_ring(u, v):
    if u.ring != v.ring:
        raise DomainError(f"ring mismatch: {u.ring!r} vs {v.ring!r}")


def add(u, v):
    _check_ring(u, v)
    n = min(u.prec, v.prec)
    R = u.ring
    return series(R, [R.add(u.coeffs[i], v.coeffs[i]) for i in range(n)])


def mul(u, v):
    _check_ring(u, v)
    n = min(u.prec, v.prec)
    R = u.ring
    out = [R.zero()] * n
    for i in range(n):
        a = u.coeffs[i]
        if R.is_zero(a):
            continue
        for j in range(n - i):
            b = v.coeffs[j]
            if not R.is_zero(b):
                out[i + j] = R.add(out[i + j], R.mul(a, b))
    return series(R, out)


def scale(u, c):
    R = u.ring
    return series(R, [R.mul(c, a) for a in u.coeffs], **u.meta)


def reduce_mod2(u):
    if u.ring != ZZ:
        raise DomainError("reduce_mod2 expects an integer series")
    return u.map(F2, lambda a: a & 1)


# --- explicit forms ---------------------------------------------------------------


def theta_form(N, flavor="FourN", prec=None):
    """sum over (m, n) of q^(m^2 + N n^2) (FourN), or the theta series of the
    principal form of discriminant -N (MinusN, N = 3 mod 4)."""
    if prec is None:
        prec = N + 2
    if flavor == "FourN":
        D = -4 * N
    elif flavor == "MinusN":
        if N % 4 != 3:
            raise DomainError("MinusN theta needs N = 3 mod 4")
        D = -N
    else:
        raise DomainError(f"unknown theta flavor {flavor}")
    r = representation_numbers(principal_form(D), prec)
    return series(ZZ, r, weight=1, level=-D, nebentypus=f"chi_{D}")


def _legendre(a, N):
    return kronecker(a, N)


def eisenstein_chi4N(N, prec=None):
    """Twice E^{chi_{4N}, 1}: constant term h(-4N), a(m) doubled."""
    if prec is None:
        prec = N + 2
    h = class_group(-4 * N).h
    c = [h] + [0] * (prec - 1)
    for d in range(1, prec, 2):
        val = (1 if d % 4 == 1 else -1) * _legendre(d, N)
        if val:
            for m in range(d, prec, d):
                c[m] += 2 * val
    return series(ZZ, c, weight=1, level=4 * N, nebentypus="chi_4N", doubled=True)


def eisenstein_chiN_chi4(N, prec=None):
    """E^{chi_N, chi_4}: a(m) = sum over d e = m, d odd, of (-1)^((d-1)/2) (e|N)."""
    if prec is None:
        prec = N + 2
    c = [0] * prec
    for d in range(1, prec, 2):
        sd = 1 if d % 4 == 1 else -1
        for e in range(1, (prec - 1) // d + 1):
            c[d * e] += sd * _legendre(e, N)
    return series(ZZ, c, weight=1, level=4 * N, nebentypus="chi_4N")


def ideal_counts(G, prec):
    """count[C][m] = number of ideals of norm m in the class represented by the
    C-th form (r_f(m) / #units, with the zero ideal dropped)."""
    w = units_count(G.disc)
    out = []
    for f in G.elements:
        r = representation_numbers(f, prec)
        if any(x % w for x in r[1:]):
            raise InternalError("representation numbers not divisible by the unit count")
        out.append([0] + [x // w for x in r[1:]])
    return out


def dihedral_form_cyclotomic(G, order, exps, prec):
    """Coefficients of f_delta over Z[zeta_order] as unreduced power vectors."""
    counts = ideal_counts(G, prec)
    coeffs = []
    for m in range(prec):
        v = [0] * order
        for C, cnt in enumerate(counts):
            if cnt[m]:
                v[exps[C] % order] += cnt[m]
        coeffs.append(tuple(v))
    return coeffs


def dihedral_form(G, delta, prec=None):
    """f_delta = sum_m q^m sum_{N(I) = m} delta(I), reduced into F2(zeta_order)."""
    if prec is None:
        prec = abs(G.disc) // 4 + 2
    K = delta.field
    cyc = dihedral_form_cyclotomic(G, delta.order, delta.exps, prec)
    out = []
    for v in cyc:
        a = 0
        for j, c in enumerate(v):
            if c & 1:
                a ^= K.root(j)
        out.append(a)
    return series(K, out, weight=1, level=-G.disc, character=list(delta.exps),
                  order=delta.order)


def two_part_log(G):
    """For each class C, (odd projection index, j) with C = C_odd * g^j where
    g generates the cyclic 2-part."""
    if not G.is_cyclic_two_part():
        raise DomainError("2-part of the class group is not cyclic")
    h2, ho = G.h_even, G.h_odd
    a = ho * pow(ho, -1, h2) if h2 > 1 else 0  # a = 0 mod ho, 1 mod h2
    b = (1 - a) % G.h if G.h > 1 else 0  # b = 1 mod ho, 0 mod h2
    g = G.two_part_generator()
    logs = {}
    x = 0
    for j in range(h2):
        logs[x] = j
        x = G.mul(x, g)
    out = []
    for C in range(G.h):
        c2 = G.power(C, a % G.h if G.h > 1 else 0)
        codd = G.power(C, b)
        out.append((codd, logs[c2]))
    return g, out


def group_ring_character_values(G, chi):
    """chi'(C) = chi(C_odd) x^j as elements of F2(zeta)[x]/(x^{2^e} - 1)."""
    R = GroupRing(G.e, chi.field)
    _, logs = two_part_log(G)
    vals = []
    for C in range(G.h):
        codd, j = logs[C]
        vals.append(R.x_power(j, chi.value(codd)))
    return R, vals


def group_ring_form(G, chi, prec=None):
    """sum_m q^m sum_{N(I) = m} chi'(I), chi' = chi on the odd part, x on a
    generator of the 2-part."""
    if prec is None:
        prec = abs(G.disc) // 4 + 2
    R, vals = group_ring_character_values(G, chi)
    counts = ideal_counts(G, prec)
    out = []
    for m in range(prec):
        a = R.zero()
        for C, cnt in enumerate(counts):
            if cnt[m] & 1:
                a = R.add(a, vals[C])
        out.append(a)
    return series(R, out, weight=1, level=-G.disc, character=list(chi.exps),
                  order=chi.order, e=G.e)


def specialize_x_to_one(u):
    R = u.ring
    return series(R.base, [R.specialize_one(a) for a in u.coeffs], **u.meta)


def hecke_Tp_on_qexp(u, p, weight, level, eps=1, out_prec=None):
    """a(m) -> a(pm) + eps p^(k-1) a(m/p); the second term is dropped when p | level."""
    if out_prec is None:
        out_prec = (u.prec - 1) // p + 1
    if u.prec < p * (out_prec - 1) + 1:
        raise DomainError("insufficient precision for T_p")
    R = u.ring
    scalar = 0 if level % p == 0 else eps * p ** (weight - 1)
    s = R.from_int(scalar)
    out = []
    for m in range(out_prec):
        a = u.coeffs[p * m]
        if scalar and m % p == 0:
            a = R.add(a, R.mul(s, u.coeffs[m // p]))
        out.append(a)
    return series(R, out, **u.meta)


def U2(u):
    return hecke_Tp_on_qexp(u, 2, 2, 4)


# --- identities -------------------------------------------------------------------


def genus_character(G, N):
    """The quadratic character of Cl(-4N) cutting out K(i): C -> chi_{-4}(v) for any
    odd value v of the form prime to N. Returned as exponents in Z/2."""
    vals = []
    for f in G.elements:
        for x in range(0, 8):
            v = next((f(x, y) for y in range(-7, 8)
                      if f(x, y) % 2 and f(x, y) % N and gcd(x, y) == 1), None)
            if v is not None:
                vals.append(0 if v % 4 == 1 else 1)
                break
        else:
            raise InternalError(f"no odd value prime to N for {f}")
    return vals


def character_sum_identity_check(N, prec=200):
    """Check, doubled to stay integral,

        E^{chi4N,1} + E^{chiN,chi4} + sum_{other delta} f_delta = (h/2) theta

    coefficientwise over Z, the sum running over all characters of Cl(-4N) with
    the trivial and the K(i)/K character replaced by the two Eisenstein series.
    Cyclotomic sums are reduced modulo Phi_n before comparing.

    Returns (ok, first_bad_index or None, details).
    """
    if N % 8 != 1:
        raise DomainError("identity is stated for N = 1 mod 8")
    G = class_group(-4 * N)
    h = G.h
    n, homs = all_characters(G)
    trivial = (0,) * h
    gen_exps = tuple(v * (n // 2) for v in genus_character(G, N))
    if gen_exps not in homs or trivial not in homs or gen_exps == trivial:
        raise InternalError("genus character is not a nontrivial class group character")
    counts = ideal_counts(G, prec)
    E1 = eisenstein_chi4N(N, prec)
    E2 = eisenstein_chiN_chi4(N, prec)
    details = {"N": N, "h": h, "characters": len(homs), "prec": prec}

    # the two excluded characters really do give the Eisenstein series
    for m in range(1, prec):
        s_triv = sum(counts[C][m] for C in range(h))
        s_gen = sum((-1 if gen_exps[C] else 1) * counts[C][m] for C in range(h))
        if 2 * s_triv != E1[m] or s_gen != E2[m]:
            details["eisenstein_mismatch"] = m
            return False, m, details

    theta = theta_form(N, "FourN", prec)
    for m in range(prec):
        v = [0] * n
        v[0] = E1[m] + 2 * E2[m]
        for exps in homs:
            if exps == trivial or exps == gen_exps:
                continue
            for C in range(h):
                if counts[C][m]:
                    v[exps[C]] += 2 * counts[C][m]
        red = reduce_cyclotomic(v, n) if n > 1 else (v[0],)
        if red[0] != h * theta[m] or any(red[1:]):
            return False, m, details
    return True, None, details


# --- image filling ----------------------------------------------------------------


def _gr_to_bits(R, a):
    r = R.base.degree
    out = 0
    for i, c in enumerate(a):
        out |= c << (i * r)
    return out


def _gr_from_bits(R, b):
    r = R.base.degree
    mask = (1 << r) - 1
    return tuple((b >> (i * r)) & mask for i in range(R.size))


def span_closure(R, gens):
    """F2-dimension of the F2-subalgebra of the group ring R generated by gens."""
    from .localalg import F2Span

    span = F2Span()
    span.add(_gr_to_bits(R, R.one()))
    for g in gens:
        span.add(_gr_to_bits(R, g))
    while True:
        basis = [_gr_from_bits(R, b) for b in span.basis()]
        before = len(basis)
        for i, a in enumerate(basis):
            for b in basis[i:]:
                span.add(_gr_to_bits(R, R.mul(a, b)))
        if len(span.basis()) == before:
            return before


def image_filling(u):
    """(F2-dimension of the base-field span of the algebra generated by the
    coefficients, F2-dimension of the whole group ring). Equal means the
    coefficients fill the group ring after extending scalars."""
    R = u.ring
    gens = [c for c in u.coeffs if not R.is_zero(c)]
    if R.base.degree > 1:
        gens.append(R.from_base(2))  # the generator y of the base field
    return span_closure(R, gens), R.base.degree * R.size
