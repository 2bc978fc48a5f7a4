"""Monte-Carlo check of the exponential select-max estimator against its closed form.

    python3 scripts/exp_selectmax_mc.py [--lam 0.2] [--K 5] [--trials 1000000] [--seed 1]
"""

import argparse
import time

from mdfb.single_round import ExpChannelSpec, selectmax_distortion, selectmax_error_param, simulate_exp_round


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=0.2)
    ap.add_argument("--K", type=int, default=5)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.05, 0.2, 0.5])
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    for e in args.eps:
        spec = ExpChannelSpec.from_eps(args.lam, e, args.K)
        t0 = time.perf_counter()
        r = simulate_exp_round(spec, args.trials, args.seed)
        print(
            f"eps={e:<5} D_mc={r.distortion:.5f} D={selectmax_distortion(spec):.5f} "
            f"lam'_mc={r.error_param:.5f} lam'={selectmax_error_param(spec):.5f} "
            f"corr={r.corr:+.1e} KS={'pass' if r.ks_pass else 'fail'} ({time.perf_counter() - t0:.2f} s)"
        )


if __name__ == "__main__":
    main()
