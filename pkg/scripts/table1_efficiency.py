"""Print the multi-round Gaussian efficiency table for a few (M, K) pairs.

    python3 scripts/table1_efficiency.py [--D-final 0.1] [--M 2 10] [--K 2 5]
"""

import argparse

from mdfb.multi_round import efficiency_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--D-final", type=float, default=0.1)
    ap.add_argument("--M", type=int, nargs="+", default=[2, 10])
    ap.add_argument("--K", type=int, nargs="+", default=[2, 5])
    args = ap.parse_args()
    print(f"{'M':>4} {'K':>3} {'sum-rate':>10} {'efficiency':>11}")
    for p in efficiency_table(1.0, args.D_final, [(m, k) for m in args.M for k in args.K]):
        print(f"{p.round:>4} {p.K:>3} {p.rate_bits:>10.5f} {p.extra['efficiency']:>11.4f}")


if __name__ == "__main__":
    main()
