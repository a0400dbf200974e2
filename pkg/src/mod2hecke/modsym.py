"""Weight-2 modular symbols for Gamma_0(N), N prime, and the integral Hecke algebra.

Manin symbols (c:d) are indexed by P^1(Z/N): index i < N is (i:1), index N is
(1:0).  Matrices act on row vectors from the right, so the matrix of T_n sends
the coordinate row of x to the coordinate row of T_n x.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np
import sympy
from flint import fmpq, fmpq_mat, fmpz_mat

from .errors import DomainError, InternalError


def sturm_bound(N):
    return -(-(N + 1) // 6)


def genus_x0(N):
    """Genus of X_0(N) for prime N."""
    if N == 2:
        return 0
    e2 = 1 + sympy.legendre_symbol(N - 1, N)
    e3 = 1 if N == 3 else 1 + sympy.jacobi_symbol(-3 % N, N)
    return _genus_formula(N + 1, e2, e3, 2)


def _genus_formula(mu, e2, e3, cusps):
    # 12 g = 12 + mu - 3 e2 - 4 e3 - 6 cusps
    twelve_g = 12 + mu - 3 * e2 - 4 * e3 - 6 * cusps
    assert twelve_g % 12 == 0
    return twelve_g // 12


@lru_cache(maxsize=None)
def heilbronn_merel(n):
    """Merel's matrices [[a,b],[c,d]] with a > b >= 0, d > c >= 0, ad - bc = n.

    Parametrized by k = a - b and j = d - c, which gives n = a j + k c.
    Returned as four int64 arrays (a, b, c, d).
    """
    rows = []
    for a in range(1, n + 1):
        for j in range(1, n // a + 1):
            rem = n - a * j
            if rem == 0:
                for k in range(1, a + 1):
                    rows.append((a, a - k, 0, j))
            else:
                for k in range(1, min(a, rem) + 1):
                    if rem % k == 0:
                        c = rem // k
                        rows.append((a, a - k, c, c + j))
    arr = np.array(rows, dtype=np.int64)
    return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]


class P1:
    """P^1(Z/N) for prime N."""

    def __init__(self, N):
        self.N = N
        self.inv = np.zeros(N, dtype=np.int64)
        for x in range(1, N):
            self.inv[x] = pow(x, -1, N)

    def __len__(self):
        return self.N + 1

    def index(self, c, d):
        N = self.N
        c %= N
        d %= N
        if d:
            return int(c * self.inv[d] % N)
        if c:
            return N
        return None

    def rep(self, i):
        return (i, 1) if i < self.N else (1, 0)

    def index_array(self, c, d):
        """Vectorized index; -1 where (c, d) = (0, 0) mod N."""
        N = self.N
        c = c % N
        d = d % N
        out = np.where(d != 0, c * self.inv[d] % N, np.where(c != 0, N, -1))
        return out


def _to_fmpq_mat(rows, ncols):
    m = fmpq_mat(len(rows), ncols)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            if v:
                m[i, j] = v
    return m


def _rref_with_pivots(m):
    r, rank = m.rref()
    pivots = []
    row = 0
    for col in range(r.ncols()):
        if row < rank and r[row, col] != 0:
            pivots.append(col)
            row += 1
    return r, rank, pivots


@dataclass
class ModularSymbolSpace:
    N: int
    p1: P1 = field(repr=False)
    basis: list = field(repr=False)  # P1 indices of the free Manin symbols
    reduce_num: fmpz_mat = field(repr=False)  # (N+1) x d, times 1/denom
    denom: int = 1
    cusp_basis: fmpq_mat = field(repr=False, default=None)  # 2g x d, rref
    cusp_pivots: list = field(repr=False, default_factory=list)
    _hecke_full: dict = field(repr=False, default_factory=dict)
    _hecke_cusp: dict = field(repr=False, default_factory=dict)

    @property
    def dimension(self):
        return len(self.basis)

    @property
    def cuspidal_dimension(self):
        return self.cusp_basis.nrows()

    @property
    def genus(self):
        return self.cuspidal_dimension // 2

    def coordinates(self, c, d):
        i = self.p1.index(c, d)
        if i is None:
            return None
        return [self.reduce_num[i, j] / self.denom for j in range(self.dimension)]

    def boundary(self, i):
        """Boundary of Manin symbol i as coefficients on the cusps (oo, 0)."""
        c, d = self.p1.rep(i)
        N = self.N
        v = [0, 0]
        v[0 if c % N == 0 else 1] += 1
        v[0 if d % N == 0 else 1] -= 1
        return v

    def _counts(self, n):
        """Integer matrix: row r counts Manin symbols in T_n(basis_r)."""
        A, B, C, D = heilbronn_merel(n)
        N = self.N
        d = self.dimension
        out = np.zeros((d, N + 1), dtype=np.int64)
        for r, i in enumerate(self.basis):
            c0, d0 = self.p1.rep(i)
            idx = self.p1.index_array(c0 * A + d0 * C, c0 * B + d0 * D)
            idx = idx[idx >= 0]
            out[r] = np.bincount(idx, minlength=N + 1)
        return out

    def hecke_prime_full(self, p):
        """Matrix of T_p (U_N when p = N) on the full space, straight from
        Heilbronn matrices."""
        counts = self._counts(p)
        d = self.dimension
        cm = fmpz_mat(d, self.N + 1, [int(x) for x in counts.ravel()])
        prod = cm * self.reduce_num
        return fmpq_mat(prod) / self.denom

    def restrict_cusp(self, M):
        X = self.cusp_basis * M
        g2 = self.cuspidal_dimension
        out = fmpq_mat(g2, g2)
        for i in range(g2):
            for k, col in enumerate(self.cusp_pivots):
                out[i, k] = X[i, col]
        # consistency: rows of X lie in the cuspidal span
        if out * self.cusp_basis != X:
            raise InternalError("Hecke operator does not preserve cusp forms")
        return out

    def hecke_full(self, n):
        return self._hecke(n, self._hecke_full, self.hecke_prime_full,
                           self.dimension)

    def hecke_cusp(self, n):
        return self._hecke(n, self._hecke_cusp,
                           lambda p: self.restrict_cusp(self.hecke_full(p)),
                           self.cuspidal_dimension)

    def _hecke(self, n, cache, prime_op, dim):
        if n in cache:
            return cache[n]
        if n == 1:
            M = _identity(dim)
        else:
            fac = sympy.factorint(n)
            if len(fac) > 1:
                p, k = max(fac.items())
                q = p ** k
                M = self._hecke(q, cache, prime_op, dim) * self._hecke(n // q, cache, prime_op, dim)
            else:
                (p, k), = fac.items()
                if k == 1:
                    M = prime_op(p)
                elif p == self.N:
                    M = self._hecke(p, cache, prime_op, dim) * self._hecke(n // p, cache, prime_op, dim)
                else:
                    Tp = self._hecke(p, cache, prime_op, dim)
                    M = Tp * self._hecke(n // p, cache, prime_op, dim) \
                        - self._hecke(n // (p * p), cache, prime_op, dim) * p
        cache[n] = M
        return M


def _identity(d):
    m = fmpq_mat(d, d)
    for i in range(d):
        m[i, i] = 1
    return m


@lru_cache(maxsize=8)
def build_space(N):
    if N < 3 or not sympy.isprime(N):
        raise DomainError(f"level must be an odd prime, got {N}")
    p1 = P1(N)
    size = N + 1

    def act_sigma(i):
        c, d = p1.rep(i)
        return p1.index(d, -c)

    def act_tau(i):
        c, d = p1.rep(i)
        return p1.index(d, -c - d)

    # two-term relations x + x sigma = 0
    free_of = [None] * size  # (sign, free generator) or None for zero
    gens = []
    for i in range(size):
        j = act_sigma(i)
        if j == i:
            continue
        if i < j:
            free_of[i] = (1, len(gens))
            gens.append(i)
    for i in range(size):
        j = act_sigma(i)
        if j != i and i > j:
            s, g = free_of[j]
            free_of[i] = (-s, g)

    # three-term relations x + x tau + x tau^2 = 0
    rels = []
    seen = set()
    for i in range(size):
        if i in seen:
            continue
        orbit = [i, act_tau(i), act_tau(act_tau(i))]
        seen.update(orbit)
        row = {}
        for k in orbit:
            if free_of[k] is not None:
                s, g = free_of[k]
                row[g] = row.get(g, 0) + s
        row = {g: v for g, v in row.items() if v}
        if row:
            rels.append(row)
    nf = len(gens)
    relm = fmpq_mat(len(rels), nf)
    for r, row in enumerate(rels):
        for g, v in row.items():
            relm[r, g] = v
    rr, rank, pivots = _rref_with_pivots(relm)
    pivset = set(pivots)
    nonpiv = [g for g in range(nf) if g not in pivset]
    pos = {g: k for k, g in enumerate(nonpiv)}
    d = len(nonpiv)
    # coordinates of every free generator on the non-pivot basis
    gen_coords = {}
    for g in nonpiv:
        gen_coords[g] = {pos[g]: fmpq(1)}
    for r, g in enumerate(pivots):
        row = {}
        for h in nonpiv:
            v = rr[r, h]
            if v != 0:
                row[pos[h]] = -v
        gen_coords[g] = row
    den = 1
    for row in gen_coords.values():
        for v in row.values():
            q = int(v.q)
            den = den * q // gcd(den, q)
    red = fmpz_mat(size, d)
    for i in range(size):
        if free_of[i] is None:
            continue
        s, g = free_of[i]
        for j, v in gen_coords[g].items():
            red[i, j] = int(v * den * s)
    basis = [gens[g] for g in nonpiv]
    S = ModularSymbolSpace(N, p1, basis, red, den)

    # cuspidal subspace: kernel of the boundary map
    bd = fmpq_mat(d, 2)
    for r, i in enumerate(basis):
        b = S.boundary(i)
        bd[r, 0], bd[r, 1] = b
    kb = _left_kernel(bd)
    kr, krank, kpiv = _rref_with_pivots(kb)
    cb = fmpq_mat(krank, d)
    for i in range(krank):
        for j in range(d):
            cb[i, j] = kr[i, j]
    S.cusp_basis = cb
    S.cusp_pivots = kpiv
    g = genus_x0(N)
    if S.cuspidal_dimension != 2 * g:
        raise InternalError(f"cuspidal dimension {S.cuspidal_dimension} != 2g = {2 * g}")
    return S


def _left_kernel(M):
    """Rows spanning {v : v M = 0}."""
    Mt = fmpz_mat(_clear(M.transpose()))
    ns, nullity = Mt.nullspace()
    rows = fmpq_mat(nullity, M.nrows())
    for k in range(nullity):
        for i in range(M.nrows()):
            rows[k, i] = ns[i, k]
    return rows


def _clear(M):
    den = 1
    for v in M.entries():
        den = den * int(v.q) // gcd(den, int(v.q))
    return [[int(M[i, j] * den) for j in range(M.ncols())] for i in range(M.nrows())]


def hecke_matrix(S, n, cuspidal=True):
    if n < 1:
        raise DomainError("n must be positive")
    return S.hecke_cusp(n) if cuspidal else S.hecke_full(n)


def charpoly(M):
    return M.charpoly()


def minimal_polynomial(M):
    return M.minpoly()


def poly_coeffs(p):
    """Coefficients of a flint polynomial, highest degree first, as ints when
    integral."""
    cs = [p[i] for i in range(p.degree(), -1, -1)]
    out = []
    for c in cs:
        c = fmpq(c)
        out.append(int(c.p) if c.q == 1 else str(c))
    return out


def poly_str(p, var="x"):
    return str(p).replace("x", var)


# --- integral Hecke algebra ---------------------------------------------------


@dataclass
class HeckeAlgebraLattice:
    """Z-lattice T spanned by Hecke operators inside End of a modular symbol space.

    ``basis`` holds the matrices of a Z-basis (Hermite form of the span);
    ``struct[i][j]`` is the integer coordinate vector of basis[i]*basis[j];
    ``coords[n]`` is the coordinate vector of T_n (U_N for n = N).
    """

    N: int
    rank: int
    bound: int
    cuspidal: bool
    basis: list = field(repr=False)
    struct: list = field(repr=False)
    coords: dict = field(repr=False)
    proj_cols: int = field(repr=False, default=0)

    def element(self, vec):
        M = self.basis[0] * 0
        for c, b in zip(vec, self.basis):
            if c:
                M += b * c
        return M

    def unit_coords(self):
        return self.coords[1]


def _flatten_rows(M, k):
    """Concatenation of the first k rows of M (an injective image of T for k large)."""
    out = []
    for i in range(k):
        for j in range(M.ncols()):
            out.append(M[i, j])
    return out


def integral_hecke_algebra(S, bound=None, cuspidal=True, extra=()):
    """Z-basis and structure constants of span{T_n : n <= bound}.

    ``extra`` lists further indices n whose coordinates are recorded
    (integrality of those coordinates is part of the closure check).
    """
    N = S.N
    if bound is None:
        bound = sturm_bound(N)
    if bound < sturm_bound(N):
        raise DomainError("bound below the Sturm bound")
    op = S.hecke_cusp if cuspidal else S.hecke_full
    dim = S.cuspidal_dimension if cuspidal else S.dimension
    rank_expected = dim // 2 if cuspidal else (dim + 1) // 2
    mats = {n: op(n) for n in range(1, bound + 1)}
    if dim == 0:
        return HeckeAlgebraLattice(N, 0, bound, cuspidal, [], [], {n: [] for n in mats})

    # choose enough rows to make t -> rows(t) injective on the span
    k = 1
    while True:
        vecs = [_flatten_rows(mats[n], k) for n in range(1, bound + 1)]
        Q = fmpq_mat(vecs)
        if Q.rank() == rank_expected or k == dim:
            break
        k = min(dim, 2 * k)
    if Q.rank() != rank_expected:
        raise InternalError(f"Hecke span has rank {Q.rank()}, expected {rank_expected}")
    den = 1
    for v in Q.entries():
        den = den * int(v.q) // gcd(den, int(v.q))
    Z = fmpz_mat([[int(v * den) for v in row] for row in vecs])
    H = Z.hnf()
    r = rank_expected
    hrows = [[H[i, j] for j in range(H.ncols())] for i in range(r)]
    pivots = []
    for row in hrows:
        pivots.append(next(j for j, v in enumerate(row) if v != 0))

    # express each basis vector as a rational combination of independent T_n
    indep = []
    for n in range(1, bound + 1):
        trial = indep + [n]
        if fmpq_mat([[Q[m - 1, p] for p in pivots] for m in trial]).rank() == len(trial):
            indep = trial
        if len(indep) == r:
            break
    A = fmpq_mat([[Q[m - 1, p] for p in pivots] for m in indep])  # r x r
    Hp = fmpq_mat([[fmpq(int(hrows[i][p]), den) for p in pivots] for i in range(r)])
    comb = Hp * A.inv()  # basis_i = sum comb[i, t] T_{indep[t]}
    basis = []
    for i in range(r):
        M = fmpq_mat(dim, dim)
        for t, m in enumerate(indep):
            c = comb[i, t]
            if c != 0:
                M += mats[m] * c
        basis.append(M)
    Hp_inv = Hp.inv()

    def coords_of(M):
        v = fmpq_mat([[fmpq(x) for x in _flatten_rows(M, k)]])
        pv = fmpq_mat([[v[0, p] for p in pivots]])
        c = pv * Hp_inv
        # full check: the candidate reproduces every projected coordinate
        out = []
        for i in range(r):
            ci = c[0, i]
            if ci.q != 1:
                return None
            out.append(int(ci.p))
        check = fmpq_mat([[fmpq(int(x), den) for x in row] for row in hrows])
        if fmpq_mat([out]) * check != v:
            return None
        return out

    struct = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(i, r):
            c = coords_of(basis[i] * basis[j])
            if c is None:
                raise InternalError(f"Hecke lattice not closed under multiplication (N={N})")
            struct[i][j] = struct[j][i] = c
    coords = {}
    for n in sorted(set(range(1, bound + 1)) | set(extra)):
        c = coords_of(op(n))
        if c is None:
            raise InternalError(f"T_{n} not in the Z-span of T_1..T_{bound} (N={N})")
        coords[n] = c
    return HeckeAlgebraLattice(N, r, bound, cuspidal, basis, struct, coords, k)


def lattice_is_stable(S, cuspidal=True):
    """Doubling the generating bound leaves the lattice unchanged."""
    b = sturm_bound(S.N)
    T1 = integral_hecke_algebra(S, b, cuspidal)
    try:
        integral_hecke_algebra(S, b, cuspidal, extra=range(b + 1, 2 * b + 1))
    except InternalError:
        return False
    return T1.rank == (S.cuspidal_dimension // 2 if cuspidal else (S.dimension + 1) // 2)


def reduce_algebra(T, k):
    """Structure constants of T tensor Z/2^k, plus distinguished elements."""
    from .localalg import FiniteCommAlgebra

    m = 1 << k
    struct = [[[x % m for x in T.struct[i][j]] for j in range(T.rank)] for i in range(T.rank)]
    named = {n: [x % m for x in v] for n, v in T.coords.items()}
    A = FiniteCommAlgebra(T.rank, struct, modulus=m, named=named)
    A.level = T.N
    return A
