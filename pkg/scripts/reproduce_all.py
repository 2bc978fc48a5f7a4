"""Write every figure and table CSV into one directory.

    python3 scripts/reproduce_all.py [OUTDIR] [--quick]

``--quick`` shrinks the Monte-Carlo sizes so the whole run takes seconds.
"""

import argparse
import sys
import time
from pathlib import Path

from mdfb import cli

QUICK = {"fig2": ["--trials", "100000"], "fig8": ["--trials", "100000"]}
FULL = {"fig2": ["--trials", "1000000"], "fig8": ["--trials", "1000000"]}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="results")
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--seed", default="2024")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    extra = QUICK if args.quick else FULL
    status = 0
    for exp in ("table1", "fig2", "fig3", "fig5", "fig6", "fig7", "fig8"):
        argv = ["reproduce", exp, "--out", str(out / f"{exp}.csv"), *extra.get(exp, [])]
        if exp in ("fig2", "fig8"):
            argv += ["--seed", args.seed]
        t0 = time.perf_counter()
        code = cli.main(argv)
        print(f"  ({time.perf_counter() - t0:.2f} s)")
        status = status or code
    code = cli.main(["verify", "--out", str(out / "verify.csv")])
    return status or code


if __name__ == "__main__":
    sys.exit(main())
