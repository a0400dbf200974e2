"""Run the verification batch over a range of prime levels and print a short
summary (hard failures, errors, discrepancy flags, slowest levels)."""

import argparse
import json

from mod2hecke.verify import ALL_CHECKS, VerifyConfig, run_range


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--from", dest="n_from", type=int, default=3)
    ap.add_argument("--to", dest="n_to", type=int, default=499)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="runs/batch")
    ap.add_argument("--checks", default=",".join(ALL_CHECKS))
    args = ap.parse_args()

    config = VerifyConfig(checks=tuple(args.checks.split(",")))
    records, summary = run_range(args.n_from, args.n_to, args.jobs, args.out, config)
    slow = sorted(records, key=lambda r: -r["timing"]["total_ms"])[:5]
    print(json.dumps({k: summary[k] for k in ("levels", "ok", "elapsed_s", "hard_failures", "errors")}, indent=1))
    print("discrepancy flags:")
    for N, flags in summary["discrepancies"].items():
        print(f"  N={N}: {', '.join(flags)}")
    print("slowest:", ", ".join(f"{r['N']} ({r['timing']['total_ms']} ms)" for r in slow))


if __name__ == "__main__":
    main()
