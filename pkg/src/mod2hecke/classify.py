"""Classification of anemic maximal ideals at prime level N: reducible,
dihedral from Q(sqrt N) or Q(sqrt -N), or other; ordinarity; and the
characteristic polynomial of Frobenius at 2 for real-dihedral fibers."""

from dataclasses import dataclass, field

import sympy

from .errors import DomainError, InternalError
from .localalg import anemic_fibers, decompose_local, eigenspace_dimension
from .modsym import build_space, integral_hecke_algebra, reduce_algebra, sturm_bound
from .quadlattice import (
    class_group,
    frobenius_class,
    imaginary_disc,
    odd_characters,
    real_disc,
)
from .rings import peval

KINDS = ("Reducible", "DihedralReal", "DihedralImaginary", "DihedralBoth", "Other")


def default_bound(N):
    return sturm_bound(N) + 10


def field_disc(tag, N):
    if tag == "real":
        return real_disc(N)
    if tag == "imag":
        return imaginary_disc(N)
    raise DomainError(f"unknown field tag {tag}")


# --- induced systems -----------------------------------------------------------


def induced_eigensystem(tag, delta, bound, N=None):
    """Traces of Ind_K delta at primes p <= bound, p != 2, in F2(zeta_order).

    Inert p -> 0, split p -> delta(P) + delta(P)^-1, ramified p -> delta(P).
    """
    G = delta.group
    if N is None:
        N = abs(G.disc) // (4 if G.disc % 4 == 0 else 1)
    if G.disc != field_disc(tag, N):
        raise DomainError("character does not belong to the requested field")
    K = delta.field
    out = {}
    for p in sympy.primerange(3, bound + 1):
        fr = frobenius_class(G, p)
        if fr.kind == "inert":
            out[p] = 0
        elif fr.kind == "split":
            out[p] = K.add(delta.value(fr.index), K.inv(delta.value(fr.index)))
        else:
            out[p] = delta.value(fr.index)
    return out


def value_at_two(tag, delta, N):
    """The trace of Frobenius at 2 when 2 is unramified, else delta(P_2)."""
    G = delta.group
    fr = frobenius_class(G, 2)
    K = delta.field
    if fr.kind == "inert":
        return 0
    if fr.kind == "split":
        return K.add(delta.value(fr.index), K.inv(delta.value(fr.index)))
    return delta.value(fr.index)


# --- per-level Hecke data --------------------------------------------------------


@dataclass
class LevelData:
    N: int
    bound: int
    genus: int
    generators: list
    space: object = field(repr=False, default=None)
    lattice: object = field(repr=False, default=None)
    algebra: object = field(repr=False, default=None)
    factors: list = field(repr=False, default_factory=list)
    fibers: list = field(repr=False, default_factory=list)


def frob2_prime(N):
    """Smallest odd prime l != N in the class of a prime above 2 (or its
    inverse) in the narrow class group of Q(sqrt N); None unless 2 splits."""
    G = class_group(real_disc(N))
    fr = frobenius_class(G, 2)
    if fr.kind != "split":
        return None
    targets = {fr.index, G.inverse(fr.index)}
    for ell in sympy.primerange(3, 100 * N + 100):
        if ell == N:
            continue
        f = frobenius_class(G, ell)
        if f.kind == "split" and f.index in targets:
            return ell
    raise InternalError("no prime found in the class of the primes above 2")


def level_data(N, bound=None, cuspidal=True, extra=()):
    if not sympy.isprime(N) or N < 3:
        raise DomainError("level must be an odd prime")
    sb = sturm_bound(N)
    if bound is None:
        bound = default_bound(N)
    if bound < sb:
        raise DomainError(f"matching bound {bound} below the Sturm bound {sb}")
    S = build_space(N)
    gens = [l for l in sympy.primerange(3, bound + 1) if l != N]
    data = LevelData(N, bound, S.genus, gens, S)
    if cuspidal and S.genus == 0:
        return data
    labels = set(gens) | {2, N} | set(extra)
    T = integral_hecke_algebra(S, sb, cuspidal, extra=sorted(labels))
    A = reduce_algebra(T, 1)
    data.lattice = T
    data.algebra = A
    data.factors = decompose_local(A)
    data.fibers = anemic_fibers(A, gens, data.factors)
    return data


# --- matching ----------------------------------------------------------------------


def match_fiber(fiber, system, primes=None):
    """Does the fiber's anemic eigensystem agree, up to Frobenius, with a
    system {l: value in some binary field K}? Returns (bool, first bad prime).

    The embedding is forced: the primitive element of the fiber's residue field
    is a polynomial in the generators, which pins down its image beta in K.
    ``primes`` (default: the fiber's generators) are the labels compared.
    """
    K, values = system
    beta = 0
    for mono in fiber.primitive_monomials():
        t = 1
        for lab in mono:
            if lab not in values:
                return False, lab
            t = K.mul(t, values[lab])
        beta ^= t
    if peval(fiber.residue.minpoly, beta, K) != 0:
        return False, None
    for ell in (fiber.generators if primes is None else primes):
        if ell not in values or peval(fiber.eigenvalue(ell), beta, K) != values[ell]:
            return False, ell
    return True, None


@dataclass
class Classification:
    index: int
    kind: str
    ordinary: bool
    dimension: int
    residue_degree: int
    anemic_dim: int
    factors: list
    matches: list
    evidence: dict
    reducible_side: bool = None

    def to_json(self):
        return {
            "index": self.index,
            "kind": self.kind,
            "ordinary": self.ordinary,
            "dimension": self.dimension,
            "residue_degree": self.residue_degree,
            "anemic_dim": self.anemic_dim,
            "factors": self.factors,
            "matches": self.matches,
            "evidence": self.evidence,
            "reducible_side": self.reducible_side,
        }


def _minpoly_of(Kf, x):
    """Minimal polynomial over F2 of x in the binary field Kf, as a bitmask."""
    orbit = [x]
    y = Kf.frobenius(x)
    while y != x:
        orbit.append(y)
        y = Kf.frobenius(y)
    # prod (z - o) over the orbit, coefficients in Kf (they land in F2)
    poly = [1]
    for o in orbit:
        new = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] ^= c
            new[i] ^= Kf.mul(c, o)
        poly = new
    m = 0
    for i, c in enumerate(poly):
        if c not in (0, 1):
            raise InternalError("minimal polynomial not over F2")
        m |= c << i
    return m


def eigensystem_summary(fiber):
    """Conjugation-invariant description: l -> minimal polynomial of a_l."""
    Kf = fiber.residue.field
    return {str(l): bin(_minpoly_of(Kf, fiber.eigenvalue(l)))[2:] for l in fiber.generators}


def character_systems(N, bound):
    """Nontrivial odd-order characters (one per inverse pair) of both fields,
    with their induced systems."""
    out = []
    for tag in ("real", "imag"):
        G = class_group(field_disc(tag, N))
        for i, d in enumerate(odd_characters(G)):
            if d.is_trivial:
                continue
            out.append((tag, i, d, (d.field, induced_eigensystem(tag, d, bound, N))))
    return out


def trivial_system(tag, N, bound):
    G = class_group(field_disc(tag, N))
    d = odd_characters(G)[0]
    assert d.is_trivial
    return d.field, induced_eigensystem(tag, d, bound, N)


def classify_fiber(fiber, N, bound, systems=None, index=0):
    if bound < sturm_bound(N):
        raise DomainError("matching bound below the Sturm bound")
    A = fiber.algebra
    if systems is None:
        systems = character_systems(N, bound)
    matches = []
    evidence = {"eigensystem": eigensystem_summary(fiber), "rejected": {}}
    for tag, i, d, sysm in systems:
        ok, bad = match_fiber(fiber, sysm)
        key = f"{tag}:{i}"
        if ok:
            matches.append({"field": tag, "character": i, "order": d.order,
                            "exps": list(d.exps)})
        else:
            evidence["rejected"][key] = bad
    all_zero = fiber.residue_degree == 1 and all(fiber.eigenvalue(l) == 0 for l in fiber.generators)
    # the trivial character gives exactly the all-zero pattern
    for tag in ("real", "imag"):
        ok, _ = match_fiber(fiber, trivial_system(tag, N, bound))
        if ok != all_zero:
            raise InternalError("trivial character system disagrees with the reducible pattern")

    t2 = A.elem(2)
    un = A.elem(N)
    ordinary = any(f.is_unit(t2) for f in fiber.factors)
    side = None
    real = any(m["field"] == "real" for m in matches)
    imag = any(m["field"] == "imag" for m in matches)
    if all_zero:
        side = all(A.is_nilpotent(A.mul(f.idempotent, t2 ^ A.one))
                   and A.is_nilpotent(A.mul(f.idempotent, un ^ A.one))
                   for f in fiber.factors)
        kind = "Reducible" if side else "Other"
        if not side:
            evidence["reducible_side_failed"] = True
    elif real and imag:
        kind = "DihedralBoth"
    elif real:
        kind = "DihedralReal"
    elif imag:
        kind = "DihedralImaginary"
    else:
        kind = "Other"
    facs = [{"dim": f.dim, "residue_degree": f.residue_degree,
             "t2_unit": f.is_unit(t2),
             "t2": bin(_minpoly_of(f.residue.field, f.eigenvalue(2)))[2:],
             "un": bin(_minpoly_of(f.residue.field, f.eigenvalue(N)))[2:]}
            for f in fiber.factors]
    return Classification(index, kind, ordinary, eigenspace_dimension(fiber),
                          fiber.residue_degree, fiber.anemic_dim, facs, matches,
                          evidence, side)


def classify_level(N, bound=None, data=None):
    if data is None:
        extra = ()
        if N % 8 == 1:
            extra = (frob2_prime(N),)
        data = level_data(N, bound, extra=extra)
    systems = character_systems(N, data.bound)
    return data, [classify_fiber(f, N, data.bound, systems, i) for i, f in enumerate(data.fibers)]


# --- Frobenius at 2 ------------------------------------------------------------------


def _trace(Kf, a, deg):
    """Trace from the degree-`deg` subfield containing a down to F2."""
    s = 0
    for _ in range(deg):
        s ^= a
        a = Kf.frobenius(a)
    return s


def frob2_charpoly_check(data, fiber, cls):
    """For a Q(sqrt N)-dihedral fiber at N = 1 mod 8: T2 is a root of
    x^2 + t x + 1 in every residue field above, with t the Frobenius trace at
    2; then the three-case accounting on roots of that polynomial in F2(t).

    Returns a dict with 'pass' and details.
    """
    N = data.N
    if N % 8 != 1:
        raise DomainError("Frobenius-at-2 check needs N = 1 mod 8")
    if cls.kind not in ("DihedralReal", "DihedralBoth"):
        raise DomainError("fiber is not real-dihedral")
    ell0 = frob2_prime(N)
    if ell0 is None:
        raise InternalError("2 does not split in Q(sqrt N)")
    A = data.algebra
    if ell0 not in A.named:
        raise DomainError(f"T_{ell0} missing from the algebra")
    t2 = A.elem(2)
    t = A.elem(ell0)
    P = A.mul(t2, t2) ^ A.mul(t, t2) ^ A.one
    root_ok = all(A.is_nilpotent(A.mul(f.idempotent, P)) for f in fiber.factors)

    # the same t through the character: check it matches the Hecke value
    G = class_group(real_disc(N))
    m = next(m for m in cls.matches if m["field"] == "real")
    d = [c for c in odd_characters(G)][m["character"]]
    t_char = value_at_two("real", d, N)

    Kf = fiber.residue.field
    t_val = fiber.residue.image(t)
    deg_k = len({t_val, *_orbit(Kf, t_val)})
    details = {"ell0": ell0, "root_ok": root_ok, "deg_k": deg_k,
               "t_minpoly": bin(_minpoly_of(Kf, t_val))[2:],
               "t_char_minpoly": bin(_minpoly_of(d.field, t_char))[2:]}
    consistent = details["t_minpoly"] == details["t_char_minpoly"]
    if t_val == 0:
        case = "double"
        # double root must be 1
        case_ok = all(A.is_nilpotent(A.mul(f.idempotent, t2 ^ A.one)) for f in fiber.factors)
    else:
        inv_t = Kf.inv(t_val)
        has_root = _trace(Kf, inv_t, deg_k) == 0
        if has_root:
            case = "distinct_roots"
            case_ok = True
            details["flag_single_factor"] = len(fiber.factors) < 2
        else:
            case = "no_root"
            case_ok = all(f.residue_degree % (2 * deg_k) == 0 for f in fiber.factors)
    details["case"] = case
    details["case_ok"] = case_ok
    details["char_consistent"] = consistent
    details["pass"] = bool(root_ok and case_ok and consistent)
    return details


def _orbit(Kf, x):
    out = []
    y = Kf.frobenius(x)
    while y != x:
        out.append(y)
        y = Kf.frobenius(y)
    return out
