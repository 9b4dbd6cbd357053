"""Run every verification suite on its default cases and print a summary line per check."""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from etb.suites import SUITES, cases_for, run_case


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--suite", choices=SUITES, action="append", help="repeatable; default all")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    jobs = [(s, ring, n) for s in (args.suite or SUITES) for ring, n in cases_for(s, None, None)]
    with ProcessPoolExecutor(max_workers=args.jobs) as ex:
        results = list(ex.map(run_case, *zip(*jobs)))
    failed = 0
    for rows in results:
        for r in rows:
            failed += not r["passed"]
            print(f"{'ok  ' if r['passed'] else 'FAIL'} {r['suite']:<12} {r['case']:<22} {r['name']}")
    print(f"{sum(map(len, results)) - failed} passed, {failed} failed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
