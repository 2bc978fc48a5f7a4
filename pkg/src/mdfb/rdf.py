"""Closed-form rate-distortion, distortion-rate and efficiency evaluators.

All rates are in bits. Negative rates from the formulas are clamped to zero.
"""

import math
from dataclasses import dataclass, field

from .errors import ParameterError
from .models import gg_constant


@dataclass(frozen=True)
class RatePoint:
    """A single (rate, distortion) operating point with bookkeeping."""

    rate_bits: float
    distortion: float
    K: int = 1
    round: int = 0
    label: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.rate_bits >= 0:
            raise ParameterError(f"rate must be >= 0, got {self.rate_bits}")
        if not self.distortion > 0:
            raise ParameterError(f"distortion must be > 0, got {self.distortion}")


def _check_positive(**kw):
    for name, value in kw.items():
        if not value > 0:
            raise ParameterError(f"{name} must be positive, got {value!r}")


def gaussian_rdf(var, D):
    """Gaussian RDF ``max(0, log2(var / D) / 2)``."""
    _check_positive(var=var, D=D)
    return max(0.0, 0.5 * math.log2(var / D))


def gaussian_drf(var, R):
    """Inverse of :func:`gaussian_rdf`: ``var * 2^(-2R)``."""
    _check_positive(var=var)
    if R < 0:
        raise ParameterError(f"rate must be >= 0, got {R}")
    return var * 2.0 ** (-2.0 * R)


def usdr(var, D):
    """Unbiased signal-to-distortion ratio ``var / D - 1``."""
    _check_positive(var=var, D=D)
    if D > var:
        raise ParameterError(f"D={D} exceeds the source variance {var}")
    return var / D - 1.0


def worst_case_efficiency(K, R):
    """``log(1 + K(2^{2R} - 1)) / (2 K R)``, equal to 1 at ``K = 1`` and as ``R -> 0``."""
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")
    if R < 0:
        raise ParameterError(f"rate must be >= 0, got {R}")
    if R < 1e-12 or K == 1:
        return 1.0
    # log2(1 + K(4^R - 1)) evaluated through expm1/log1p for small R
    growth = K * math.expm1(2.0 * R * math.log(2.0))
    return math.log1p(growth) / math.log(2.0) / (2.0 * K * R)


def exp_rdf(lam, D):
    """Exponential source under one-sided error: ``max(0, -log2(lam D))``."""
    _check_positive(lam=lam, D=D)
    return max(0.0, -math.log2(lam * D))


def exp_drf(lam, R):
    """Inverse of :func:`exp_rdf`: ``2^{-R} / lam``."""
    _check_positive(lam=lam)
    if R < 0:
        raise ParameterError(f"rate must be >= 0, got {R}")
    return 2.0 ** (-R) / lam


def gg_slb(alpha, D, p, q):
    """Shannon lower bound ``[log2(alpha/D) + log2(c_p/c_q e^{1/q - 1/p})]^+`` in bits."""
    _check_positive(alpha=alpha, D=D, p=p, q=q)
    value = math.log2(alpha / D) + math.log2(gg_constant(p) / gg_constant(q)) + (1.0 / q - 1.0 / p) / math.log(2.0)
    return max(0.0, value)


def efficiency(ref_rate, sum_rate):
    """Ratio of the ideal rate to the operational sum-rate."""
    if not sum_rate > 0:
        raise ParameterError(f"sum-rate must be positive, got {sum_rate}")
    return ref_rate / sum_rate
