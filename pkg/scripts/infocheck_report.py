"""Print convergence diagnostics for the mutual-information identities.

    python3 scripts/infocheck_report.py
"""

from mdfb.infocheck import eps1_ratio, gaussian_worst_bound, random_vnc_family, run_suite, vnc_scaling
from mdfb.models import Uniform, laplacian


def main():
    for r in run_suite():
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name:<18} {r.detail} ({r.seconds:.2f} s)")
    print("\nVNC family (3x3, seeded):")
    sc = vnc_scaling(random_vnc_family(3, 3, 3, 20240601))
    for e, a, b in zip(sc.eps, sc.xy_over_eps2 / sc.constant, sc.yz_over_xy):
        print(f"  eps={e:.0e}  I(X;Y)/(c eps^2)={a:.8f}  I(Y;Z)/I(X;Y)={b:.3e}")
    print("\neps/1 ratio:")
    for e in (1e-1, 1e-2, 1e-3, 1e-4):
        print(f"  eps={e:.0e}  ratio={eps1_ratio(e).ratio:.7f}")
    print("\nGaussian-worst bound, D1/D2 = 4:")
    for name, src in (("laplacian", laplacian(1.0)), ("uniform", Uniform.with_variance(1.0))):
        for D1 in (1e-1, 1e-2, 1e-3):
            b = gaussian_worst_bound(src, D1, D1 / 4)
            print(f"  {name:<9} D1={D1:.0e} margin={b.margin:.3e} worst={b.worst_margin:.3e}")


if __name__ == "__main__":
    main()
