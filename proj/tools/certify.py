#!/usr/bin/env python3
"""Print an exact drift certificate for the k=2 suppression chain.

Finds constants for the given load, checks the ten side conditions, then
scans population shells for the threshold above which every state has
negative drift. All arithmetic is exact; floats appear only in the report.

Usage: certify.py --lambda 1/2 [--us 2] [--mu 1] [--shells 100:2000:50]
Needs the p2plab extension on PYTHONPATH (build/python after a build).
"""

import argparse
from fractions import Fraction

import p2plab


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambda", dest="lam", required=True)
    ap.add_argument("--us", default="2")
    ap.add_argument("--mu", default="1")
    ap.add_argument("--c1", help="preset instead of the built-in search")
    ap.add_argument("--c3")
    ap.add_argument("--c4")
    ap.add_argument("--shells", default="100:2000:50")
    ap.add_argument("--mode", choices=["full", "grid"], default="full")
    args = ap.parse_args()

    preset = {key: val for key, val in
              (("c1", args.c1), ("c3", args.c3), ("c4", args.c4)) if val}
    consts = p2plab.find_constants(args.lam, args.us, **preset)
    print("constants:")
    for key in ("c1", "c2", "c3", "c4", "p"):
        print(f"  {key} = {consts[key]}")

    ok = p2plab.check_conditions(consts, args.lam, args.us)
    print("conditions:", "all hold" if all(ok) else
          "FAILED at " + ", ".join(str(i + 1) for i, v in enumerate(ok) if not v))

    lo, hi, step = (int(x) for x in args.shells.split(":"))
    shells = list(range(lo, hi + 1, step))
    scan = p2plab.drift_scan(consts, args.lam, args.us, args.mu,
                             shells=shells, mode=args.mode)
    print(f"scan: {len(shells)} shells in [{lo}, {hi}], mode {args.mode}")
    for s, max_dv, argmax in scan["shells"]:
        mark = "-" if Fraction(max_dv["exact"]) < 0 else "+"
        print(f"  s={s:>7} {mark} max drift {max_dv['value']:.6g}  at {argmax}")
    if scan["s0"] is None:
        print("no all-negative tail in this range; widen --shells")
    else:
        print(f"certified: drift <= -epsilon for every shell >= {scan['s0']}")
        print(f"  s0 = {scan['s0']}, epsilon = {scan['epsilon']['exact']}"
              f" ({scan['epsilon']['value']:.6g})")


if __name__ == "__main__":
    main()
