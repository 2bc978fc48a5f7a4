"""The infocheck property suite as one callable, shared by the CLI and the tests."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..models import GaussianMixture, Uniform, laplacian
from .awgn import AwgnTestChannel, GaussianSource, additive_rdf_slope, binary_source, immse_check, oversampling_identity
from .channels import eps1_ratio
from .conditional import jointly_gaussian, mixture_indicator, mmse_linearity_condition
from .discrete import random_vnc_family, vnc_scaling
from .highrate import mixture_rate_loss

VNC_SEED = 20240601


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    values: dict = field(default_factory=dict)


def _timed(name, fn):
    t0 = time.perf_counter()
    passed, detail, values = fn()
    return CheckResult(name, bool(passed), detail, time.perf_counter() - t0, values)


def check_immse():
    errs = {}
    for label, src in (("gaussian", GaussianSource(1.0)), ("binary", binary_source())):
        errs[label] = immse_check(AwgnTestChannel(src), (0.1, 0.5, 1.0)).max_relative_error
    worst = max(errs.values())
    return worst < 1e-4, f"max relative derivative error {worst:.2e} (< 1e-4)", errs


def check_oversampling():
    res = {}
    for label, src in (("gaussian", GaussianSource(1.0)), ("binary", binary_source())):
        for K in (1, 2, 3):
            res[f"{label}_K{K}"] = oversampling_identity(AwgnTestChannel(src, 1.0, K)).residual
    worst = max(res.values())
    return worst < 1e-6, f"max identity residual {worst:.2e} (< 1e-6)", res


def check_vnc():
    sc = vnc_scaling(random_vnc_family(3, 3, 3, VNC_SEED))
    rel = abs(sc.xy_over_eps2[-1] / sc.constant - 1)
    r2, r4 = float(sc.yz_over_xy[1]), float(sc.yz_over_xy[-1])
    ok = rel < 1e-3 and r2 < 1e-2 and r4 < 1e-6
    return ok, f"I(X;Y)/eps^2 rel. gap {rel:.2e}; I(Y;Z)/I(X;Y) {r2:.2e} at 1e-2, {r4:.2e} at 1e-4", {
        "rel_gap": rel, "ratio_1e-2": r2, "ratio_1e-4": r4}


def check_eps1():
    r = eps1_ratio(1e-4).ratio
    return abs(r - 1) < 1e-2, f"ratio {r:.6f} at eps = 1e-4", {"ratio": r}


def check_linearity():
    g = mmse_linearity_condition(jointly_gaussian(1.0, 0.5))
    m = mmse_linearity_condition(mixture_indicator(GaussianMixture.balanced(10.0)))
    ok = g.equal and abs(g.gap) <= 1e-9 and m.gap > 0 and not m.equal
    return ok, f"gaussian gap {g.gap:.1e}; mixture Jensen gap {m.gap:.4f}", {"gaussian_gap": g.gap, "mixture_gap": m.gap}


def check_additive_slope():
    gaps = {}
    for label, src in (("binary", binary_source()), ("uniform", Uniform.with_variance(1.0)), ("laplacian", laplacian(1.0))):
        gaps[label] = additive_rdf_slope(src, 1e-3).relative_gap
    worst = max(gaps.values())
    return worst < 1e-2, f"max relative slope gap {worst:.2e} at gamma = 1e-3", gaps


def check_mixture_rate_loss():
    ratios = [r.ratio for r in mixture_rate_loss((10.0, 100.0, 1000.0))]
    ok = all(b > a for a, b in zip(ratios, ratios[1:]))
    return ok, "ratios " + ", ".join(f"{r:.2f}" for r in ratios), {"ratios": ratios}


CHECKS = (
    ("immse", check_immse),
    ("oversampling", check_oversampling),
    ("vnc", check_vnc),
    ("eps1", check_eps1),
    ("mmse_linearity", check_linearity),
    ("additive_slope", check_additive_slope),
    ("mixture_rate_loss", check_mixture_rate_loss),
)


def run_suite(names=None):
    """Run the named checks (all by default) and return their results in order."""
    return [_timed(n, fn) for n, fn in CHECKS if names is None or n in names]
