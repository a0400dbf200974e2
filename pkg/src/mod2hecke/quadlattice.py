"""Binary quadratic forms and class groups of the quadratic fields Q(sqrt(+-N)).

Definite discriminants use Gauss-reduced forms; indefinite discriminants use
narrow (proper) classes, each represented by the least reduced form on its
reduction cycle.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

import sympy

from .errors import DomainError, InternalError
from .rings import cyclotomic_field, multiplicative_order


def _is_square(n):
    return n >= 0 and isqrt(n) ** 2 == n


@dataclass(frozen=True, order=True)
class BinaryQuadraticForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        d = self.disc
        if d % 4 not in (0, 1) or d == 0 or _is_square(d):
            raise DomainError(f"bad discriminant {d} for {self.abc}")
        if gcd(gcd(self.a, self.b), self.c) != 1:
            raise DomainError(f"form {self.abc} is not primitive")
        if d < 0 and self.a <= 0:
            raise DomainError(f"definite form {self.abc} must be positive")

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    @property
    def abc(self):
        return (self.a, self.b, self.c)

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def principal_form(disc):
    if disc % 4 == 0:
        return BinaryQuadraticForm(1, 0, -disc // 4)
    return BinaryQuadraticForm(1, 1, (1 - disc) // 4)


def _from_ab(a, b, disc):
    return BinaryQuadraticForm(a, b, (b * b - disc) // (4 * a))


# --- reduction ---------------------------------------------------------------


def reduce_definite(f):
    """Unique reduced form properly equivalent to a positive definite ``f``."""
    D = f.disc
    if D >= 0:
        raise DomainError("reduce_definite needs a negative discriminant")
    a, b = f.a, f.b
    while True:
        b += 2 * a * ((a - b) // (2 * a))
        c = (b * b - D) // (4 * a)
        if a > c:
            a, b = c, -b
            continue
        if a == c and b < 0:
            b = -b
        return BinaryQuadraticForm(a, b, c)


def is_reduced_indefinite(f):
    s = isqrt(f.disc)
    return 0 < f.b <= s and s - f.b < 2 * abs(f.a) <= s + f.b


def rho(f):
    """One step of the indefinite reduction operator (a proper equivalence)."""
    D = f.disc
    s = isqrt(D)
    c = f.c
    ac = abs(c)
    if ac > s:
        b2 = ac - ((ac + f.b) % (2 * ac))
    else:
        b2 = s - ((s + f.b) % (2 * ac))
    return _from_ab(c, b2, D)


def reduce_indefinite(f):
    if f.disc <= 0:
        raise DomainError("reduce_indefinite needs a positive discriminant")
    for _ in range(10 ** 6):
        if is_reduced_indefinite(f):
            return f
        f = rho(f)
    raise InternalError("indefinite reduction did not terminate")


def reduction_cycle(f):
    f = reduce_indefinite(f)
    cyc = [f]
    g = rho(f)
    while g != f:
        cyc.append(g)
        g = rho(g)
    return cyc


def canonical(f):
    """Class representative: reduced form (definite) or least form of the cycle."""
    if f.disc < 0:
        return reduce_definite(f)
    return min(reduction_cycle(f))


# --- composition -------------------------------------------------------------


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def compose(f, g):
    """Dirichlet composition of two forms of equal discriminant, canonicalized."""
    D = f.disc
    if g.disc != D:
        raise DomainError("cannot compose forms of different discriminants")
    a1, b1, _ = f.abc
    a2, b2, _ = g.abc
    m = (b1 + b2) // 2
    g1, u, v = _xgcd(a1, a2)
    e, s, t = _xgcd(g1, m)
    p, q, r = s * u, s * v, t
    a3 = a1 * a2 // (e * e)
    B = (p * a1 * b2 + q * a2 * b1 + r * (b1 * b2 + D) // 2) // e
    B %= 2 * abs(a3)
    if (B * B - D) % (4 * a3):
        raise InternalError(f"composition failed for {f}, {g}")
    return canonical(_from_ab(a3, B, D))


def inverse_form(f):
    return canonical(BinaryQuadraticForm(f.a, -f.b, f.c))


# --- Kronecker symbol and square roots ---------------------------------------


def kronecker(D, p):
    """Kronecker symbol (D | p) for a prime p."""
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = D % p
    if r == 0:
        return 0
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


def sqrt_disc_mod_4p(D, p):
    """Least b >= 0 with b = D mod 2 and b^2 = D mod 4p, or None."""
    if p < 10 ** 4:
        for b in range(D % 2, 2 * p, 2):
            if (b * b - D) % (4 * p) == 0:
                return b
        return None
    roots = sympy.ntheory.residue_ntheory.sqrt_mod(D, 4 * p, all_roots=True)
    roots = sorted(b for b in roots if (b - D) % 2 == 0 and b < 2 * p)
    return roots[0] if roots else None


# --- class groups ------------------------------------------------------------


def reduced_definite_forms(D):
    out = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (b < 0 and c == a):
                continue
            if gcd(gcd(a, b), c) == 1:
                out.append(BinaryQuadraticForm(a, b, c))
    return out


def reduced_indefinite_forms(D):
    s = isqrt(D)
    out = []
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        n = (b * b - D) // 4
        for a in range((s - b) // 2 + 1, (s + b) // 2 + 1):
            for sa in (a, -a):
                if n % sa == 0:
                    c = n // sa
                    if gcd(gcd(sa, b), c) == 1:
                        out.append(BinaryQuadraticForm(sa, b, c))
    return out


@dataclass
class ClassGroup:
    disc: int
    elements: list
    table: list
    index: dict = field(repr=False)
    structure: tuple = ()

    @property
    def h(self):
        return len(self.elements)

    @property
    def h_even(self):
        h = self.h
        return h & -h

    @property
    def e(self):
        return self.h_even.bit_length() - 1

    @property
    def h_odd(self):
        return self.h // self.h_even

    @property
    def identity(self):
        return 0

    def mul(self, i, j):
        return self.table[i][j]

    def power(self, i, n):
        r = 0
        x = i
        while n:
            if n & 1:
                r = self.table[r][x]
            x = self.table[x][x]
            n >>= 1
        return r

    def inverse(self, i):
        return self.index[inverse_form(self.elements[i])]

    def order(self, i):
        k, x = 1, i
        while x != 0:
            x = self.table[x][i]
            k += 1
        return k

    def class_of(self, f):
        return self.index[canonical(f)]

    def torsion_count(self, m):
        return sum(1 for i in range(self.h) if self.power(i, m) == 0)

    def two_rank(self):
        return self.torsion_count(2).bit_length() - 1

    def is_cyclic_two_part(self):
        return self.two_rank() <= 1

    def two_part_generator(self):
        """Least-index element of order h_even (None if the 2-part is not cyclic)."""
        for i in range(self.h):
            if self.order(i) % self.h_even == 0:
                return self.power(i, self.h_odd)
        return None

    def check_axioms(self):
        h = self.h
        t = self.table
        for i in range(h):
            if t[0][i] != i or t[i][0] != i:
                return False
            if 0 not in t[i]:
                return False
            for j in range(h):
                if t[i][j] != t[j][i]:
                    return False
        for i in range(h):
            for j in range(h):
                tij = t[i][j]
                for k in range(h):
                    if t[tij][k] != t[i][t[j][k]]:
                        return False
        return True

    def summary(self):
        return {
            "disc": self.disc,
            "h": self.h,
            "h_even": self.h_even,
            "e": self.e,
            "invariant_factors": list(self.structure),
            "representatives": [list(f.abc) for f in self.elements],
        }


def _invariant_factors(G):
    """Invariant factors d1 | d2 | ... from torsion counts of each p-part."""
    h = G.h
    parts = []
    for p, k in sympy.factorint(h).items():
        sizes = [1]
        i = 1
        while sizes[-1] < p ** k:
            sizes.append(G.torsion_count(p ** i))
            i += 1
        # number of cyclic factors of order >= p^i
        ge = [round(_log(sizes[i] // sizes[i - 1], p)) for i in range(1, len(sizes))]
        exps = []
        for i, cnt in enumerate(ge, start=1):
            nxt = ge[i] if i < len(ge) else 0
            exps += [i] * (cnt - nxt)
        parts.append((p, sorted(exps, reverse=True)))
    width = max((len(e) for _, e in parts), default=0)
    factors = [1] * width
    for p, exps in parts:
        for j, x in enumerate(exps):
            factors[j] *= p ** x
    return tuple(sorted(factors))


def _log(n, p):
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k


H_CAP = 10 ** 5


@lru_cache(maxsize=256)
def class_group(disc):
    if disc == 0 or _is_square(disc) or disc % 4 not in (0, 1):
        raise DomainError(f"unsupported discriminant {disc}")
    if disc < 0:
        elements = reduced_definite_forms(disc)
    else:
        seen = set()
        elements = []
        for f in reduced_indefinite_forms(disc):
            if f in seen:
                continue
            cyc = reduction_cycle(f)
            seen.update(cyc)
            elements.append(min(cyc))
    if len(elements) > H_CAP:
        raise DomainError("class number above the supported cap")
    princ = canonical(principal_form(disc))
    elements.remove(princ)
    elements = [princ] + sorted(elements)
    index = {f: i for i, f in enumerate(elements)}
    h = len(elements)
    table = [[0] * h for _ in range(h)]
    for i in range(h):
        for j in range(i, h):
            k = index[compose(elements[i], elements[j])]
            table[i][j] = table[j][i] = k
    G = ClassGroup(disc, elements, table, index)
    G.structure = _invariant_factors(G)
    return G


# --- field conventions -------------------------------------------------------


def imaginary_disc(N):
    """Discriminant used for Q(sqrt(-N)): -4N if N = 1 mod 4, else -N."""
    return -4 * N if N % 4 == 1 else -N


def real_disc(N):
    return N if N % 4 == 1 else 4 * N


# --- Frobenius classes -------------------------------------------------------


@dataclass(frozen=True)
class Frobenius:
    kind: str  # "split", "inert" or "ramified"
    index: int = None


def frobenius_class(G, p):
    D = G.disc
    k = kronecker(D, p)
    if k == -1:
        return Frobenius("inert")
    b = sqrt_disc_mod_4p(D, p)
    if b is None:
        raise InternalError(f"no square root of {D} mod 4*{p}")
    f = _from_ab(p, b, D)
    return Frobenius("ramified" if k == 0 else "split", G.class_of(f))


# --- representation numbers --------------------------------------------------


def representation_numbers(f, bound):
    """r_f(m) for 0 <= m < bound, by enumerating lattice points."""
    D = f.disc
    if D >= 0:
        raise DomainError("representation numbers need a definite form")
    a, b, c = f.abc
    nD = -D
    r = [0] * bound
    ymax = isqrt(4 * a * (bound - 1) // nD) + 1
    for y in range(-ymax, ymax + 1):
        # a x^2 + b y x + c y^2 < bound
        rest = 4 * a * (bound - 1) - nD * y * y
        if rest < 0:
            continue
        w = isqrt(rest) + 1
        lo = (-b * y - w) // (2 * a) - 1
        hi = (-b * y + w) // (2 * a) + 1
        for x in range(lo, hi + 1):
            v = a * x * x + b * x * y + c * y * y
            if v < bound:
                r[v] += 1
    return r


def representation_count(f, m):
    if f.disc >= 0:
        raise DomainError("representation counts need a definite form")
    return representation_numbers(f, m + 1)[m]


def units_count(disc):
    return {-3: 6, -4: 4}.get(disc, 2)


# --- genus theory ------------------------------------------------------------


def genus_checks(N):
    """Genus-theory clauses for Q(sqrt(-N)); None marks a clause not applicable."""
    G = class_group(imaginary_disc(N))
    nprimes = len(sympy.primefactors(G.disc))
    out = {"disc": G.disc, "two_rank": G.two_rank(), "ramified_primes": nprimes}
    out["a"] = G.two_rank() == nprimes - 1
    out["b"] = (G.h_even == 2) if N % 8 == 5 else None
    out["c"] = (G.is_cyclic_two_part() and G.h_even >= 4) if N % 8 == 1 else None
    return out


# --- characters --------------------------------------------------------------


@dataclass(frozen=True)
class ClassCharacter:
    """delta(C) = zeta_order ** exps[C]."""

    group: ClassGroup = field(compare=False, repr=False, hash=False)
    disc: int
    order: int
    exps: tuple

    @property
    def field(self):
        return cyclotomic_field(self.order)

    @property
    def degree(self):
        return multiplicative_order(2, self.order)

    @property
    def is_trivial(self):
        return self.order == 1

    def value(self, i):
        return self.field.root(self.exps[i])

    def inverse(self):
        return ClassCharacter(self.group, self.disc, self.order,
                              tuple(-x % self.order for x in self.exps))


def all_characters(G, n=None):
    """All homomorphisms G -> Z/n (n defaults to the exponent of G).

    Built by extending from the trivial subgroup one generator at a time.
    """
    if n is None:
        n = 1
        for d in G.structure:
            n = n * d // gcd(n, d)
    h = G.h
    # characters as dicts on the current subgroup
    sub = {0}
    chars = [{0: 0}]
    for g in range(h):
        if g in sub:
            continue
        m, x = 1, g
        while x not in sub:
            x = G.mul(x, g)
            m += 1
        # g^m in sub; choose delta(g) = z with m z = delta(g^m) mod n
        new_sub = set()
        cosets = []
        y = 0
        for k in range(m):
            cosets.append((k, y))
            y = G.mul(y, g)
        for s in sub:
            for k, gk in cosets:
                new_sub.add(G.mul(s, gk))
        new_chars = []
        for ch in chars:
            target = ch[x]
            for z in range(n):
                if (m * z - target) % n:
                    continue
                ext = {}
                for s in sub:
                    for k, gk in cosets:
                        ext[G.mul(s, gk)] = (ch[s] + k * z) % n
                new_chars.append(ext)
        sub, chars = new_sub, new_chars
    return n, [tuple(ch[i] for i in range(h)) for ch in chars]


def _normalize(n, exps):
    o = 1
    for v in exps:
        o = o * (n // gcd(n, v)) // gcd(o, n // gcd(n, v))
    return o, tuple(v * o // n for v in exps)


def odd_characters(G):
    """One representative per {delta, delta^-1} pair of odd-order characters."""
    n = G.h_odd
    exp_odd = 1
    for d in G.structure:
        d_odd = d // (d & -d)
        exp_odd = exp_odd * d_odd // gcd(exp_odd, d_odd)
    _, homs = all_characters(G, exp_odd)
    reps = {}
    for exps in homs:
        o, ex = _normalize(exp_odd, exps)
        inv = tuple(-v % o for v in ex)
        key = min(ex, inv)
        reps[key] = o
    assert len(homs) == n
    chars = [ClassCharacter(G, G.disc, o, key) for key, o in reps.items()]
    chars.sort(key=lambda c: (c.order, c.exps))
    return chars


def character_from_exps(G, n, exps):
    o, ex = _normalize(n, exps)
    return ClassCharacter(G, G.disc, o, ex)
