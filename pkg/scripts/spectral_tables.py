"""Write the spectral sequence page tables of ET(F_q^n) as CSV files."""

import argparse
import csv
from pathlib import Path

from etb.spectral import spectral_for
from etb.ring import ring_make


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--case", action="append", default=None, help="ring:rank, e.g. fq:2:3 (repeatable)")
    ap.add_argument("--coeff", action="append", default=None)
    ap.add_argument("--outdir", default="ss_tables")
    args = ap.parse_args()
    cases = args.case or ["fq:2:3", "fq:3:2"]
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for case in cases:
        desc, n = case.rsplit(":", 1)
        for coeff in args.coeff or ["q", "fp:2"]:
            _, res = spectral_for(ring_make(desc), int(n), coeff)
            path = out / f"{desc.replace(':', '')}_n{n}_{coeff.replace(':', '')}.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["r", "p", "q", "dim"])
                w.writerows(res.csv_rows())
            print(f"{path}  checks={'ok' if res.passed else res.checks}")


if __name__ == "__main__":
    main()
