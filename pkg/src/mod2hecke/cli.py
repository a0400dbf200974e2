"""Command line: classgroup, qexp, hecke, classify, verify."""

import argparse
import json
import sys

from .errors import DomainError


def _emit(obj, fmt, text_lines):
    if fmt == "json":
        print(json.dumps(obj, sort_keys=True, indent=1))
    else:
        for line in text_lines:
            print(line)


def cmd_classgroup(args):
    from .quadlattice import class_group

    G = class_group(args.disc)
    obj = G.summary()
    lines = [f"disc {G.disc}{' (narrow)' if G.disc > 0 else ''}",
             f"h = {G.h}, structure = {list(G.structure)}, h_even = {G.h_even}, e = {G.e}"]
    lines += [f"  [{i}] {f.abc}" for i, f in enumerate(G.elements)]
    _emit(obj, args.format, lines)


def _qexp(args):
    from . import qseries as qs
    from .quadlattice import class_group, imaginary_disc, odd_characters

    kind = args.kind
    if kind in ("theta", "eisenstein1", "eisenstein2") and args.N is None:
        raise DomainError(f"--N is required for {kind}")
    if kind == "theta":
        flavor = "MinusN" if args.disc is not None and args.disc == -args.N else "FourN"
        return qs.theta_form(args.N, flavor, args.prec)
    if kind == "eisenstein1":
        return qs.eisenstein_chi4N(args.N, args.prec)
    if kind == "eisenstein2":
        return qs.eisenstein_chiN_chi4(args.N, args.prec)
    disc = args.disc if args.disc is not None else (imaginary_disc(args.N) if args.N else None)
    if disc is None:
        raise DomainError("--disc or --N is required")
    G = class_group(disc)
    chars = odd_characters(G)
    if not 0 <= args.char < len(chars):
        raise DomainError(f"--char must be in [0, {len(chars) - 1}]")
    d = chars[args.char]
    if kind == "dihedral":
        return qs.dihedral_form(G, d, args.prec)
    return qs.group_ring_form(G, d, args.prec)


def cmd_qexp(args):
    u = _qexp(args)
    obj = u.to_json()
    coeffs = obj["coeffs"]
    _emit(obj, args.format, [f"{obj['ring']} prec {u.prec} {u.meta}",
                             " ".join(str(c) for c in coeffs)])


def cmd_hecke(args):
    from .classify import level_data
    from .modsym import build_space, minimal_polynomial, poly_coeffs, poly_str

    N = args.N
    S = build_space(N)
    obj = {"N": N, "genus": S.genus, "dimension": S.dimension}
    lines = [f"N = {N}, genus = {S.genus}, modular symbols dimension = {S.dimension}"]
    if S.genus:
        data = level_data(N)
        obj["lattice_rank"] = data.lattice.rank
        lines.append(f"Hecke lattice rank = {data.lattice.rank}")
        obj["minpoly"] = {}
        for n, name in ((2, "T2"), (N, "U_N"), (3, "T3"), (5, "T5")):
            if n == N and name != "U_N":
                continue
            mp = minimal_polynomial(S.hecke_cusp(n))
            obj["minpoly"][name] = poly_coeffs(mp)
            lines.append(f"  minpoly {name}: {poly_str(mp)}")
        if args.local:
            A = data.algebra
            obj["local_factors"] = [
                {"dim": f.dim, "residue_degree": f.residue_degree, "rad_dim": f.rad_dim}
                for f in data.factors]
            obj["anemic_fibers"] = [
                {"anemic_dim": fb.anemic_dim, "residue_degree": fb.residue_degree,
                 "factors": [data.factors.index(f) for f in fb.factors]}
                for fb in data.fibers]
            lines.append(f"T tensor F2: dim {A.dim}")
            for i, f in enumerate(data.factors):
                lines.append(f"  factor {i}: dim {f.dim}, residue degree {f.residue_degree}, radical dim {f.rad_dim}")
            for i, fb in enumerate(data.fibers):
                idx = [data.factors.index(f) for f in fb.factors]
                lines.append(f"  anemic fiber {i}: dim {fb.anemic_dim}, residue degree {fb.residue_degree}, factors {idx}")
    _emit(obj, args.format, lines)


def cmd_classify(args):
    from .classify import classify_level

    data, classes = classify_level(args.N, args.bound)
    obj = {"N": args.N, "genus": data.genus, "bound": data.bound,
           "fibers": [c.to_json() for c in classes]}
    lines = [f"N = {args.N}, genus = {data.genus}, matching bound = {data.bound}",
             f"{'#':>3} {'kind':<18} {'ord':<5} {'dim':>4} {'k':>3} matches"]
    for c in classes:
        m = ", ".join(f"{x['field']}:{x['character']}(order {x['order']})" for x in c.matches)
        lines.append(f"{c.index:>3} {c.kind:<18} {str(c.ordinary):<5} {c.dimension:>4} {c.residue_degree:>3} {m}")
    _emit(obj, args.format, lines)


def cmd_verify(args):
    from .verify import ALL_CHECKS, VerifyConfig, run_range, summary_csv

    checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    bad = [c for c in checks if c not in ALL_CHECKS]
    if bad:
        raise DomainError(f"unknown checks: {bad}")
    config = VerifyConfig(bound=args.bound, prec=args.prec, checks=checks)
    records, summary = run_range(args.n_from, args.n_to, args.jobs, args.out, config)
    if args.format == "json":
        print(json.dumps(summary, sort_keys=True, indent=1))
    elif args.format == "csv":
        sys.stdout.write(summary_csv(records))
    else:
        for r in records:
            cl = " ".join(f"{k}={v['status']}" for k, v in r["clauses"].items() if v["applicable"])
            flags = f" flags={r['discrepancies']}" if r["discrepancies"] else ""
            fails = f" FAIL={r['hard_failures']}" if r["hard_failures"] else ""
            err = f" ERROR={r['error']}" if r["error"] else ""
            print(f"N={r['N']:>4} mod8={r['mod8']} g={r['genus']:>3} {r['status']:<5} {cl}{fails}{flags}{err}")
        print(f"levels={summary['levels']} ok={summary['ok']} elapsed={summary['elapsed_s']}s")
    return 0 if summary["ok"] else 1


def build_parser():
    p = argparse.ArgumentParser(prog="mod2hecke")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classgroup", help="class group of a discriminant (narrow if positive)")
    c.add_argument("disc", type=int)
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.set_defaults(func=cmd_classgroup)

    q = sub.add_parser("qexp", help="explicit weight-1 q-expansions")
    q.add_argument("--kind", required=True,
                   choices=("theta", "eisenstein1", "eisenstein2", "dihedral", "groupring"))
    q.add_argument("--N", type=int)
    q.add_argument("--disc", type=int)
    q.add_argument("--char", type=int, default=0)
    q.add_argument("--prec", type=int, default=None)
    q.add_argument("--format", choices=("text", "json"), default="text")
    q.set_defaults(func=cmd_qexp)

    h = sub.add_parser("hecke", help="Hecke algebra data at prime level N")
    h.add_argument("N", type=int)
    h.add_argument("--local", action="store_true", help="dump the local decomposition mod 2")
    h.add_argument("--format", choices=("text", "json"), default="text")
    h.set_defaults(func=cmd_hecke)

    k = sub.add_parser("classify", help="classify the anemic maximal ideals at level N")
    k.add_argument("N", type=int)
    k.add_argument("--bound", type=int, default=None)
    k.add_argument("--format", choices=("text", "json"), default="text")
    k.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify", help="verify the dimension bounds over a range of primes")
    v.add_argument("--from", dest="n_from", type=int, required=True)
    v.add_argument("--to", dest="n_to", type=int, required=True)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--prec", type=int, default=None)
    v.add_argument("--bound", type=int, default=None)
    v.add_argument("--format", choices=("json", "csv", "text"), default="text")
    v.add_argument("--out", default=None)
    v.add_argument("--checks", default="theorem,unlemma,construction,identity,oracle")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
