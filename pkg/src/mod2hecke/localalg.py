"""Finite commutative algebras over Z/2^k given by structure constants.

Over F2 elements are bitmask integers (bit i = coefficient of basis vector i).
Frobenius x -> x^2 is F2-linear on a commutative F2-algebra, which gives both
the nilradical (kernel of a high Frobenius power) and the span of idempotents
(kernel of Frobenius + 1) by plain linear algebra.
"""

import random
from dataclasses import dataclass, field

import numpy as np
from flint import fmpz_mat

from .errors import DomainError
from .rings import BinaryField, is_irreducible, peval


def bits(v):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def to_mask(vec):
    m = 0
    for i, x in enumerate(vec):
        if x % 2:
            m |= 1 << i
    return m


class F2Span:
    """Echelonized span of bitmask vectors; can express members in terms of
    the vectors that were added."""

    def __init__(self):
        self.rows = {}  # pivot bit -> (vector, combination mask)
        self.count = 0

    def __len__(self):
        return len(self.rows)

    def reduce(self, v):
        c = 0
        while v:
            p = v.bit_length() - 1
            if p not in self.rows:
                break
            rv, rc = self.rows[p]
            v ^= rv
            c ^= rc
        return v, c

    def _full_reduce(self, v):
        c = 0
        out = 0
        while v:
            p = v.bit_length() - 1
            if p in self.rows:
                rv, rc = self.rows[p]
                v ^= rv
                c ^= rc
            else:
                out |= 1 << p
                v ^= 1 << p
        return out, c

    def add(self, v):
        """Add v; returns True if it enlarged the span."""
        tag = 1 << self.count
        self.count += 1
        r, c = self._full_reduce(v)
        if r == 0:
            return False
        self.rows[r.bit_length() - 1] = (r, c ^ tag)
        return True

    def contains(self, v):
        return self._full_reduce(v)[0] == 0

    def express(self, v):
        """Mask of added vectors summing to v, or None."""
        r, c = self._full_reduce(v)
        return c if r == 0 else None

    def basis(self):
        return [rv for rv, _ in self.rows.values()]


def span_of(vectors):
    s = F2Span()
    for v in vectors:
        s.add(v)
    return s


def kernel_of(subspace, f):
    """Basis of the kernel of f restricted to span(subspace) (subspace independent)."""
    rows = [(f(u), u) for u in subspace]
    kern = []
    pivots = {}
    for img, pre in rows:
        while img:
            p = img.bit_length() - 1
            if p not in pivots:
                break
            pi, pp = pivots[p]
            img ^= pi
            pre ^= pp
        if img:
            pivots[img.bit_length() - 1] = (img, pre)
        else:
            kern.append(pre)
    return kern


class FiniteCommAlgebra:
    """Commutative unital algebra free over Z/m with basis e_0..e_{dim-1}.

    ``struct[i][j]`` is the coordinate vector of e_i e_j; ``named`` maps labels
    (Hecke indices) to coordinate vectors.
    """

    def __init__(self, dim, struct, modulus=2, named=None, unit=None):
        self.dim = dim
        self.modulus = modulus
        self.S = np.array(struct, dtype=np.int64).reshape(dim, dim, dim) % modulus if dim else np.zeros((0, 0, 0), dtype=np.int64)
        self.named = dict(named or {})
        if unit is None:
            unit = self.named.get(1)
        if unit is None:
            unit = self._find_unit()
        self.unit_vec = np.array(unit, dtype=np.int64) % modulus
        if modulus == 2:
            self._S2 = [[to_mask(self.S[i, j]) for j in range(dim)] for i in range(dim)]

    # --- generic arithmetic -------------------------------------------------

    def mul_vec(self, a, b):
        return np.einsum("i,j,ijk->k", a, b, self.S) % self.modulus

    def check_commutative(self):
        return bool(np.all(self.S == self.S.transpose(1, 0, 2)))

    def check_associative(self):
        d = self.dim
        # (e_i e_j) e_k = e_i (e_j e_k)
        left = np.einsum("ijm,mkn->ijkn", self.S, self.S) % self.modulus
        right = np.einsum("jkm,imn->ijkn", self.S, self.S) % self.modulus
        return bool(np.all(left == right))

    def _find_unit(self):
        if self.modulus != 2:
            raise DomainError("unit must be given for modulus > 2")
        d = self.dim
        # solve sum_i u_i S[i][j] = e_j for all j
        for cand in range(1 << d) if d <= 16 else []:
            u = np.array([(cand >> i) & 1 for i in range(d)])
            if all(np.array_equal(self.mul_vec(u, np.eye(d, dtype=np.int64)[j]),
                                  np.eye(d, dtype=np.int64)[j]) for j in range(d)):
                return u
        raise DomainError("no unit found")

    # --- F2 specialisations -------------------------------------------------

    @property
    def one(self):
        return to_mask(self.unit_vec)

    def elem(self, label):
        return to_mask(self.named[label])

    def mul(self, a, b):
        S = self._S2
        r = 0
        for i in bits(a):
            Si = S[i]
            for j in bits(b):
                r ^= Si[j]
        return r

    def square(self, a):
        # Frobenius is additive: (sum e_i)^2 = sum e_i^2
        S = self._S2
        r = 0
        for i in bits(a):
            r ^= S[i][i]
        return r

    def power(self, a, n):
        r = self.one
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def basis_masks(self):
        return [1 << i for i in range(self.dim)]

    def radical(self):
        """Nilradical = kernel of Frobenius^m with 2^m >= dim."""
        if not hasattr(self, "_rad"):
            m = max(1, (self.dim).bit_length())

            def frob_m(x):
                for _ in range(m):
                    x = self.square(x)
                return x

            self._rad = kernel_of(self.basis_masks(), frob_m)
            self._rad_span = span_of(self._rad)
        return self._rad

    def is_nilpotent(self, x):
        self.radical()
        return self._rad_span.contains(x)

    def idempotent_space(self, subspace=None):
        if subspace is None:
            subspace = self.basis_masks()
        return kernel_of(subspace, lambda x: self.square(x) ^ x)

    def ideal(self, e):
        """Basis of e*A."""
        return span_of(self.mul(e, b) for b in self.basis_masks()).basis()


def primitive_idempotents(A, boolean_basis):
    """Split 1 by the basis of a Boolean algebra of idempotents."""
    parts = [A.one]
    for b in boolean_basis:
        new = []
        for e in parts:
            x = A.mul(e, b)
            y = x ^ e
            for z in (x, y):
                if z:
                    new.append(z)
        parts = new
    return sorted(parts)


# --- residue fields -------------------------------------------------------------


class ResidueField:
    """k = L / rad(L) for a local subalgebra L (unit ``e``) of an F2-algebra,
    presented as F2[z]/(m(z)) with z the image of a primitive element ``y``."""

    def __init__(self, A, e, space, rad, candidates, seed=0):
        self.A = A
        self.e = e
        self.rad_span = span_of(rad)
        self.degree = len(space) - len(rad)
        self.seed = None
        self.y = None
        self.y_label = None
        for label, y in candidates:
            if self._try(y):
                self.y_label = label
                break
        if self.y is None:
            rng = random.Random(seed)
            self.seed = seed
            for _ in range(200):
                coeffs = [rng.randrange(2) for _ in candidates]
                y = 0
                used = []
                for c, (label, cand) in zip(coeffs, candidates):
                    if c:
                        y ^= cand
                        used.append(label)
                if self._try(y):
                    self.y_label = ("sum", tuple(used))
                    break
        if self.y is None:
            raise DomainError("no primitive element found for residue field")
        self.field = BinaryField(self.minpoly)

    def _try(self, y):
        A = self.A
        y = A.mul(self.e, y)
        s = F2Span()
        for b in self.rad_span.basis():
            s.add(b)
        base = len(s)
        powers = []
        p = self.e
        k = 0
        while True:
            c = s.express(p) if s.contains(p) else None
            if c is not None:
                break
            powers.append(p)
            s.add(p)
            p = A.mul(p, y)
            k += 1
        if k != self.degree:
            return False
        # p = y^k is a combination of lower powers modulo the radical
        c = s.express(p)
        m = 1 << k
        for j in bits(c):
            if j >= base:
                m |= 1 << (j - base)
        if not is_irreducible(m):
            return False
        self.y = y
        self.minpoly = m
        self._span = s
        self._base = base
        return True

    def image(self, x):
        """Image of x (an element of L, or of A multiplied by e) as an element of
        F2[z]/(m)."""
        x = self.A.mul(self.e, x)
        c = self._span.express(x)
        if c is None:
            raise DomainError("element not in this local algebra")
        v = 0
        for j in bits(c):
            if j >= self._base:
                v |= 1 << (j - self._base)
        return v


# --- local factors and fibers --------------------------------------------------


@dataclass
class LocalFactor:
    idempotent: int
    dim: int
    residue_degree: int
    rad_dim: int
    algebra: FiniteCommAlgebra = field(repr=False, default=None)
    residue: ResidueField = field(repr=False, default=None)

    @property
    def dim_over_residue(self):
        return self.dim // self.residue_degree

    def eigenvalue(self, label):
        """Image of a named element in the residue field (bitmask in residue.field)."""
        return self.residue.image(self.algebra.elem(label))

    def is_unit(self, x):
        return not self.algebra.is_nilpotent(self.algebra.mul(self.idempotent, x))


def _ordered_candidates(A):
    order = []
    for key in (2, getattr(A, "level", None)):
        if key in A.named:
            order.append(key)
    for key in sorted(k for k in A.named if isinstance(k, int)):
        if key not in order and key != 1:
            order.append(key)
    cands = [(k, A.elem(k)) for k in order]
    cands += [(("basis", i), 1 << i) for i in range(A.dim)]
    return cands


def decompose_local(A):
    """Complete orthogonal idempotent decomposition of an F2-algebra."""
    if A.modulus != 2:
        raise DomainError("decompose_local works over F2")
    if not A.check_commutative():
        raise DomainError("algebra is not commutative")
    idems = primitive_idempotents(A, A.idempotent_space())
    rad = A.radical()
    cands = _ordered_candidates(A)
    out = []
    for e in idems:
        space = A.ideal(e)
        erad = span_of(A.mul(e, r) for r in rad).basis()
        r = len(space) - len(erad)
        res = ResidueField(A, e, space, erad, cands)
        if len(space) % r:
            raise DomainError("residue degree does not divide local dimension")
        out.append(LocalFactor(e, len(space), r, len(erad), A, res))
    return out


@dataclass
class AnemicFiber:
    """Full local factors over one maximal ideal of the anemic subalgebra."""

    idempotent: int
    factors: list
    anemic_dim: int
    residue: ResidueField = field(repr=False, default=None)
    generators: dict = field(repr=False, default_factory=dict)
    monomials: list = field(repr=False, default_factory=list)
    algebra: FiniteCommAlgebra = field(repr=False, default=None)

    @property
    def residue_degree(self):
        return self.residue.degree

    def eigenvalue(self, label):
        return self.residue.image(self.algebra.elem(label))

    def primitive_monomials(self):
        """Monomial expansion (list of tuples of generator labels) of the
        primitive element of the residue field."""
        lab = self.residue.y_label
        labels = lab[1] if lab[0] == "sum" else [lab]
        return [self.monomials[l[1]] for l in labels]


def anemic_subalgebra(A, gen_labels):
    """Closure of the generators under multiplication, with a monomial for every
    basis vector (monomials are tuples of generator labels)."""
    span = F2Span()
    elems = []
    monos = []
    queue = [(A.one, ())]
    while queue:
        x, mono = queue.pop(0)
        if not span.add(x):
            continue
        elems.append(x)
        monos.append(mono)
        for lab in gen_labels:
            queue.append((A.mul(x, A.elem(lab)), tuple(sorted(mono + (lab,)))))
    return elems, monos


def anemic_fibers(A, gen_labels, factors=None):
    if factors is None:
        factors = decompose_local(A)
    sub, monos = anemic_subalgebra(A, gen_labels)
    bool_basis = A.idempotent_space(sub)
    idems = primitive_idempotents(A, bool_basis)
    fibers = []
    for em in idems:
        above = [f for f in factors if A.mul(em, f.idempotent) == f.idempotent]
        local = span_of(A.mul(em, u) for u in sub).basis()
        rad = kernel_of(local, lambda x: _frob_pow(A, x))
        cands = [(("mono", i), A.mul(em, u)) for i, u in enumerate(sub)]
        res = ResidueField(A, em, local, rad, cands)
        fibers.append(AnemicFiber(em, above, len(local), res,
                                  {lab: A.elem(lab) for lab in gen_labels}, monos, A))
    fibers.sort(key=lambda f: (min(fa.idempotent for fa in f.factors), f.idempotent))
    return fibers


def _frob_pow(A, x):
    for _ in range(max(1, A.dim.bit_length())):
        x = A.square(x)
    return x


def group_factors_by_kernel(A, factors, gen_labels):
    """Group full local factors by the kernel of the anemic subalgebra in their
    residue fields (the anemic maximal ideal they lie over).

    Independent of the anemic idempotents used by ``anemic_fibers``.
    """
    sub, _ = anemic_subalgebra(A, gen_labels)
    groups = {}
    for f in factors:
        ker = kernel_of(sub, lambda x, e=f.idempotent: _frob_pow(A, A.mul(e, x)))
        key = tuple(sorted(span_of(ker).basis()))
        groups.setdefault(key, []).append(f)
    return list(groups.values())


def eigenspace_dimension(fiber):
    """sum over factors above the fiber of [k_a : F2] * dim_{k_a} T_a/(2)."""
    return sum(f.residue_degree * f.dim_over_residue for f in fiber.factors)


def fiber_summand_dimension(A, e):
    """dim_F2 of the direct summand e*A (the oracle route)."""
    return len(A.ideal(e))


# --- membership over Z/2^k ---------------------------------------------------------


def _hnf_rows(vectors, modulus, dim):
    rows = [list(map(int, v)) for v in vectors]
    rows += [[modulus if i == j else 0 for j in range(dim)] for i in range(dim)]
    H = fmpz_mat(rows).hnf()
    out = []
    for i in range(H.nrows()):
        r = [int(H[i, j]) for j in range(dim)]
        if any(r):
            out.append(r)
    return out


def _in_lattice(H, v):
    """Membership of integer vector v in the row lattice of an HNF basis H."""
    v = list(map(int, v))
    for row in H:
        p = next(j for j, x in enumerate(row) if x)
        if v[p] % row[p]:
            return False
        q = v[p] // row[p]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


def subalgebra_membership(A, gen_labels, target):
    """Is ``target`` (label or coordinate vector) in the Z/2^k-subalgebra
    generated by 1 and the named generators?"""
    m = A.modulus
    d = A.dim
    tvec = A.named[target] if not isinstance(target, (list, tuple, np.ndarray)) else target
    vecs = [A.unit_vec] + [np.array(A.named[l], dtype=np.int64) for l in gen_labels]
    H = _hnf_rows(vecs, m, d)
    while True:
        basis = [np.array(r, dtype=np.int64) % m for r in H]
        prods = [A.mul_vec(a, b) for i, a in enumerate(basis) for b in basis[i:]]
        H2 = _hnf_rows([r for r in H] + prods, m, d)
        if H2 == H:
            break
        H = H2
    return _in_lattice(H, tvec)


# --- monogenic local algebras ---------------------------------------------------


def nilpotent_generator_structure(A, e=None):
    """If e*A (local, residue field F2) is F2[x]/(x^n), return n, else None."""
    if e is None:
        e = A.one
    space = A.ideal(e)
    rad = span_of(A.mul(e, r) for r in A.radical()).basis()
    if len(space) - len(rad) != 1:
        return None
    n = len(space)
    if not rad:
        return 1
    rad2 = span_of(A.mul(a, b) for i, a in enumerate(rad) for b in rad[i:])
    cotangent = len(rad) - len(rad2)
    if cotangent != 1:
        return None
    x = next(r for r in rad if not rad2.contains(r))
    # x^(n-1) != 0 confirms the nilpotency index
    p = A.power(x, n - 1)
    p = A.mul(p, e)
    return n if p else None


def algebra_from_table(struct, unit=None):
    d = len(struct)
    return FiniteCommAlgebra(d, struct, modulus=2, unit=unit)


def subalgebra_algebra(A, basis, unit):
    """A subalgebra of an F2-algebra, given by an F2-basis closed under
    multiplication, as a FiniteCommAlgebra in its own right."""
    s = F2Span()
    for b in basis:
        if not s.add(b):
            raise DomainError("subalgebra basis is not independent")
    d = len(basis)

    def coords(x):
        c = s.express(x)
        if c is None:
            raise DomainError("subspace is not closed under multiplication")
        return [(c >> i) & 1 for i in range(d)]

    struct = [[coords(A.mul(a, b)) for b in basis] for a in basis]
    return FiniteCommAlgebra(d, struct, modulus=2, unit=coords(unit))
