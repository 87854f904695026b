"""Run the acceptance criteria and print one PASS/FAIL line each.

    python3 scripts/run_acceptance.py            # all eight
    python3 scripts/run_acceptance.py --only 3 7
"""
import argparse
import json
import sys

from entangle_lab.acceptance import CRITERIA, run_criterion
from entangle_lab.report import jsonable


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", type=int, nargs="+", choices=sorted(CRITERIA), help="criterion numbers")
    ap.add_argument("--json", help="also write results to this path")
    args = ap.parse_args()
    results = [run_criterion(n) for n in (args.only or sorted(CRITERIA))]
    for r in results:
        print(r.line())
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(jsonable([{**vars(r), "ok": r.ok} for r in results]), fh, indent=1, sort_keys=True)
    return 0 if all(r.ok for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
