"""Empirical multi-round threshold VQ on a Laplacian source under absolute error.

    python3 scripts/tvq_laplacian.py [--L 1000000] [--d 20] [--seed 2024]
"""

import argparse
import math
import time

from mdfb.experiments import FIG8_THRESHOLDS
from mdfb.models import Absolute, laplacian
from mdfb.tvq import accumulated_rate_loss, tvq_multiround


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=1_000_000)
    ap.add_argument("--d", type=int, default=20)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    for M, thr in FIG8_THRESHOLDS.items():
        t0 = time.perf_counter()
        run = tvq_multiround(laplacian(1.0), list(thr), args.d, L=args.L, measure=Absolute, seed=args.seed)
        loss = accumulated_rate_loss(run)[-1]
        print(
            f"M={M} thresholds={thr} final D={run.D[-1]:.4f} ({10 * math.log10(run.D[-1]):.4f} dB) "
            f"rate={run.cumulative_rate[-1]:.4f} b/dim loss={loss:.4f} ({time.perf_counter() - t0:.2f} s)"
        )


if __name__ == "__main__":
    main()
