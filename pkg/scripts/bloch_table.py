"""Tabulate coker(Cbar_4(2) -> Cbar_3(2)) and the Claim check for a range of prime powers."""

import argparse

from etb.grassmann import bloch_cokernel, claim_check
from etb.ring import ring_make


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("q", nargs="*", default=["2", "3", "4", "5", "7", "8", "9", "11", "13"])
    ap.add_argument("--claim-max", type=int, default=7, help="skip the Claim check above this q")
    args = ap.parse_args()
    print(f"{'q':>4} {'gens':>5} {'coker':>10} {'claim':>8} {'H4':>6}")
    for q in args.q:
        R = ring_make(f"fq:{q}")
        b = bloch_cokernel(R)
        claim, h4 = "-", "-"
        if R.cardinality <= args.claim_max:
            c = claim_check(R)
            claim, h4 = c.status, c.h4
        print(f"{q:>4} {b.generators_count:>5} {str(b.group.structure()):>10} {claim:>8} {h4:>6}")


if __name__ == "__main__":
    main()
