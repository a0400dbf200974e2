"""Small commutative coefficient rings used by q-expansions and characters.

Elements are plain Python values so that series arithmetic stays cheap:

* ``Integers`` and ``IntegersMod`` use ``int``;
* ``BinaryField`` (F_{2^r}) uses an ``int`` bitmask of a polynomial of degree < r;
* ``GroupRing`` (F_{2^r}[x]/(x^{2^e} - 1)) uses a tuple of field elements.

Polynomials over F2 are also bitmasks: bit i is the coefficient of x^i.
"""

from functools import lru_cache

import sympy

from .errors import DomainError


# --- F2[x] as bitmask integers --------------------------------------------


def clmul(a, b):
    """Carry-less product of two F2[x] bitmasks."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def pdeg(a):
    return a.bit_length() - 1


def pmod(a, m):
    dm = pdeg(m)
    while a and pdeg(a) >= dm:
        a ^= m << (pdeg(a) - dm)
    return a


def pdivmod(a, m):
    q = 0
    dm = pdeg(m)
    while a and pdeg(a) >= dm:
        s = pdeg(a) - dm
        q |= 1 << s
        a ^= m << s
    return q, a


def pgcd(a, b):
    while b:
        a, b = b, pmod(a, b)
    return a


def pmulmod(a, b, m):
    return pmod(clmul(a, b), m)


def ppowmod(a, n, m):
    r = 1
    a = pmod(a, m)
    while n:
        if n & 1:
            r = pmulmod(r, a, m)
        a = pmulmod(a, a, m)
        n >>= 1
    return r


def peval(p, x, field):
    """Evaluate the F2[x] bitmask ``p`` at an element ``x`` of ``field``."""
    r = 0
    for i in range(pdeg(p), -1, -1):
        r = field.mul(r, x)
        if (p >> i) & 1:
            r ^= 1
    return r


def is_irreducible(f):
    """Rabin's test over F2."""
    n = pdeg(f)
    if n <= 0:
        return False
    if n == 1:
        return True
    x = 2
    if ppowmod(x, 1 << n, f) != pmod(x, f):
        return False
    for q in sympy.primefactors(n):
        h = ppowmod(x, 1 << (n // q), f) ^ x
        if pgcd(f, pmod(h, f)) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def least_irreducible(r):
    """Lexicographically least irreducible polynomial of degree r over F2."""
    for f in range(1 << r, 1 << (r + 1)):
        if is_irreducible(f):
            return f
    raise AssertionError("unreachable")


@lru_cache(maxsize=None)
def cyclotomic_factor(n):
    """Least irreducible factor of the n-th cyclotomic polynomial mod 2 (n odd)."""
    if n % 2 == 0:
        raise DomainError("cyclotomic embedding needs odd n")
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.cyclotomic_poly(n, x), x, modulus=2)
    best = None
    for fac, _ in poly.factor_list()[1]:
        bits = 0
        for i, c in enumerate(reversed(fac.all_coeffs())):
            if int(c) % 2:
                bits |= 1 << i
        if best is None or bits < best:
            best = bits
    return best


def multiplicative_order(a, n):
    if n == 1:
        return 1
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


# --- rings -------------------------------------------------------------------


class Integers:
    kind = "Integers"
    characteristic = 0

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def __eq__(self, other):
        return type(other) is Integers

    def __hash__(self):
        return hash("ZZ")

    def __repr__(self):
        return "ZZ"

    def to_json(self, a):
        return a


class IntegersMod:
    kind = "IntegersMod2^k"

    def __init__(self, k):
        if k < 1:
            raise DomainError("need k >= 1")
        self.k = k
        self.modulus = 1 << k
        self.characteristic = self.modulus

    def zero(self):
        return 0

    def one(self):
        return 1 % self.modulus

    def from_int(self, n):
        return n % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def neg(self, a):
        return -a % self.modulus

    def mul(self, a, b):
        return a * b % self.modulus

    def is_zero(self, a):
        return a == 0

    def __eq__(self, other):
        return isinstance(other, IntegersMod) and other.k == self.k

    def __hash__(self):
        return hash(("Zmod2^k", self.k))

    def __repr__(self):
        return f"Z/2^{self.k}"

    def to_json(self, a):
        return a


class BinaryField:
    """F_{2^r} = F2[y]/(modulus)."""

    kind = "BinaryField"
    characteristic = 2

    def __init__(self, modulus):
        if not is_irreducible(modulus):
            raise DomainError("modulus must be irreducible over F2")
        self.modulus = modulus
        self.degree = pdeg(modulus)
        self.order = 1 << self.degree

    @classmethod
    def standard(cls, r):
        return cls(least_irreducible(r))

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n & 1

    def add(self, a, b):
        return a ^ b

    def neg(self, a):
        return a

    def mul(self, a, b):
        return pmod(clmul(a, b), self.modulus)

    def pow(self, a, n):
        if n < 0:
            a, n = self.inv(a), -n
        return ppowmod(a, n, self.modulus)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_2^r")
        return ppowmod(a, self.order - 2, self.modulus)

    def frobenius(self, a):
        return self.mul(a, a)

    def is_zero(self, a):
        return a == 0

    def elements(self):
        return range(self.order)

    def __eq__(self, other):
        return isinstance(other, BinaryField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("GF2r", self.modulus))

    def __repr__(self):
        return f"GF(2^{self.degree})[{bin(self.modulus)}]"

    def to_json(self, a):
        return a


F2 = BinaryField(0b11)


class CyclotomicField(BinaryField):
    """F2(zeta_n) for odd n, with zeta_n the class of y modulo the least
    irreducible factor of Phi_n."""

    def __init__(self, n):
        super().__init__(cyclotomic_factor(n) if n > 1 else 0b11)
        self.n = n
        self.zeta = 2 % self.modulus if n > 1 else 1
        if n > 1 and self.degree == 1:
            self.zeta = 1

    def root(self, k):
        """zeta_n ** k."""
        return self.pow(self.zeta, k % self.n)


@lru_cache(maxsize=None)
def cyclotomic_field(n):
    return CyclotomicField(n)


class GroupRing:
    """F[x]/(x^{2^e} - 1) for a binary field F; multiplication is cyclic
    convolution of length 2^e."""

    kind = "GroupRing"
    characteristic = 2

    def __init__(self, e, base=F2):
        if e < 0:
            raise DomainError("need e >= 0")
        self.e = e
        self.size = 1 << e
        self.base = base

    def zero(self):
        return (0,) * self.size

    def one(self):
        return (1,) + (0,) * (self.size - 1)

    def x_power(self, j, coeff=1):
        v = [0] * self.size
        v[j % self.size] = coeff
        return tuple(v)

    def from_int(self, n):
        return self.x_power(0, n & 1)

    def from_base(self, c):
        return self.x_power(0, c)

    def add(self, a, b):
        return tuple(x ^ y for x, y in zip(a, b))

    def neg(self, a):
        return a

    def mul(self, a, b):
        n = self.size
        out = [0] * n
        bm = self.base.mul
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    out[(i + j) % n] ^= bm(ai, bj)
        return tuple(out)

    def is_zero(self, a):
        return not any(a)

    def specialize_one(self, a):
        """Image under x -> 1 (the only 2^e-th root of unity in characteristic 2)."""
        s = 0
        for c in a:
            s ^= c
        return s

    def __eq__(self, other):
        return (isinstance(other, GroupRing) and other.e == self.e
                and other.base == self.base)

    def __hash__(self):
        return hash(("GroupRing", self.e, self.base))

    def __repr__(self):
        return f"{self.base!r}[x]/(x^{self.size}-1)"

    def to_json(self, a):
        return list(a)


# --- integer cyclotomic polynomials (for exact checks over Z[zeta_n]) ----------


@lru_cache(maxsize=None)
def cyclotomic_int(n):
    """Coefficients (low degree first) of the n-th cyclotomic polynomial over Z."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, cyclotomic_int(d))
    return tuple(num)


def _exact_div(num, den):
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        q[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    assert not any(num), "inexact cyclotomic division"
    return q


def reduce_cyclotomic(vec, n):
    """Canonical form of sum vec[j] zeta_n^j: remainder modulo Phi_n (monic)."""
    phi = cyclotomic_int(n)
    d = len(phi) - 1
    v = list(vec)
    for i in range(len(v) - 1, d - 1, -1):
        c = v[i]
        if c:
            for j, pj in enumerate(phi):
                v[i - d + j] -= c * pj
    return tuple(v[:d]) if d else ()
