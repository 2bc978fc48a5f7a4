"""One round of K independent encodings.

Two families are covered:

* one-sided exponential source, one-sided error, select-max decoder;
* generalized Gaussian source, p-th power error, select-non-zero decoder.

The exponential forward test channel is ``Y = max(0, X - E)`` with
``E ~ Exp(delta)``, ``delta = 1/D - lam``. It gives ``P(Y = 0 | x) =
exp(-delta x)`` and reproduces the backward channel ``X = Y + Exp(1/D)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from ._parallel import CHUNK_SIZE, map_chunks
from .errors import ConsistencyError, NumericalError, ParameterError
from .models import GeneralizedGaussian, OneSidedExp, gg_constant

KS_SAMPLES = 100_000


# -- exponential source ------------------------------------------------------


@dataclass(frozen=True)
class ExpChannelSpec:
    lam: float
    D: float
    K: int = 1

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lam must be positive, got {self.lam}")
        if not 0 < self.D <= 1.0 / self.lam * (1 + 1e-12):
            raise ParameterError(f"D must lie in (0, 1/lam], got {self.D}")
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")

    @classmethod
    def from_eps(cls, lam, eps, K):
        """Channel with ``D = (1 - eps) / lam``."""
        if not 0 <= eps < 1:
            raise ParameterError(f"eps must be in [0, 1), got {eps}")
        return cls(lam=lam, D=(1.0 - eps) / lam, K=K)

    @property
    def delta(self):
        return max(0.0, 1.0 / self.D - self.lam)

    @property
    def rate_bits(self):
        """Per-description rate ``-log2(lam D)``."""
        return max(0.0, -math.log2(self.lam * self.D))


def selectmax_estimate(y, axis=-1):
    """Largest of the K encodings (along ``axis`` for arrays)."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ParameterError("select-max needs at least one encoding")
    out = np.max(y, axis=axis)
    return float(out) if out.ndim == 0 else out


def selectmax_distortion(spec):
    """``D / (K - (K - 1) lam D)``."""
    return spec.D / (spec.K - (spec.K - 1) * spec.lam * spec.D)


def selectmax_error_param(spec):
    """Rate parameter ``lam + K delta`` of the select-max estimation error."""
    return spec.lam + spec.K * spec.delta


def exp_forward_channel(x, spec, rng):
    """Draw K conditionally independent encodings of ``x``; returns shape ``(K, len(x))``."""
    if spec.delta == 0:
        return np.zeros((spec.K, x.size))
    e = rng.exponential(1.0 / spec.delta, size=(spec.K, x.size))
    return np.maximum(0.0, x - e)


@dataclass(frozen=True)
class ExpRoundResult:
    distortion: float
    error_param: float
    corr: float
    ks_stat: float
    ks_critical: float
    trials: int
    chunk_size: int

    @property
    def ks_pass(self):
        return self.ks_stat < self.ks_critical


def _exp_chunk(spec, keep):
    src = OneSidedExp(spec.lam)

    def work(index, size, rng):
        x = src.sample(size, rng)
        y = exp_forward_channel(x, spec, rng)
        if np.any(y > x):
            raise ConsistencyError("single_round.simulate_exp_round: forward channel produced an encoding above the source sample")
        yhat = y.max(axis=0)
        z = x - yhat
        sums = np.array([z.sum(), yhat.sum(), (z * z).sum(), (yhat * yhat).sum(), (z * yhat).sum()])
        return sums, (z[:keep] if index == 0 else None)

    return work


def simulate_exp_round(spec, trials, seed, chunk=CHUNK_SIZE):
    """Monte-Carlo select-max round; reports distortion, fitted error rate and diagnostics.

    The fitted rate is the maximum-likelihood estimate ``1 / mean(Z)``. The
    Kolmogorov-Smirnov statistic is computed on the first ``KS_SAMPLES``
    errors against ``Exp(lam + K delta)``.
    """
    if trials < 10_000:
        raise ParameterError(f"need at least 10^4 trials, got {trials}")
    keep = min(KS_SAMPLES, chunk)
    parts = map_chunks(_exp_chunk(spec, keep), seed, trials, chunk)
    total = np.sum([p[0] for p in parts], axis=0)
    n = float(trials)
    mz, my = total[0] / n, total[1] / n
    cov = total[4] / n - mz * my
    vz, vy = total[2] / n - mz * mz, total[3] / n - my * my
    corr = cov / math.sqrt(vz * vy) if vz > 0 and vy > 0 else 0.0
    z = parts[0][1]
    lam_prime = selectmax_error_param(spec)
    ks = stats.kstest(z, stats.expon(scale=1.0 / lam_prime).cdf).statistic
    return ExpRoundResult(
        distortion=mz,
        error_param=1.0 / mz,
        corr=corr,
        ks_stat=float(ks),
        ks_critical=1.628 / math.sqrt(z.size),
        trials=int(trials),
        chunk_size=int(chunk),
    )


def exp_drf_eps(lam, eps, K):
    """Optimal distortion at sum-rate ``-K log2(1 - eps)``: ``(1 - eps)^K / lam``."""
    return (1.0 - eps) ** K / lam


def exp_odrf_eps(lam, eps, K):
    """Select-max distortion at the same sum-rate: ``(1 - eps) / (lam (1 + eps (K - 1)))``."""
    return (1.0 - eps) / (lam * (1.0 + eps * (K - 1)))


def exp_slope_ratio(lam, K, eps, h=None):
    """Ratio of the eps-derivatives of the optimal and the select-max DRF (central differences)."""
    h = eps * 1e-3 if h is None else h
    d1 = (exp_drf_eps(lam, eps + h, K) - exp_drf_eps(lam, eps - h, K)) / (2 * h)
    d2 = (exp_odrf_eps(lam, eps + h, K) - exp_odrf_eps(lam, eps - h, K)) / (2 * h)
    return d1 / d2


# -- generalized Gaussian source ---------------------------------------------


@dataclass(frozen=True)
class GGChannelSpec:
    alpha: float
    p: float
    D: float
    K: int = 1

    def __post_init__(self):
        if not self.alpha > 0 or not self.p > 0:
            raise ParameterError(f"alpha and p must be positive, got {self.alpha}, {self.p}")
        if not 0 < self.D <= self.alpha:
            raise ParameterError(f"D must lie in (0, alpha], got {self.D}")
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")

    def _denominator(self):
        a, d, p, k = self.alpha, self.D, self.p, self.K
        return d**p + k * a**p - k * d**p

    @property
    def rate_nats(self):
        """Per-description rate ``log(alpha / D)`` in nats."""
        return math.log(self.alpha / self.D)


def gg_prob_all_zero(spec):
    """Probability that all K encodings are zero."""
    a, d, p, k = spec.alpha, spec.D, spec.p, spec.K
    return d * (d / a) ** (p * k) * spec._denominator() ** (-1.0 / p)


def gg_prob_zero_given_x(spec, x):
    """Forward-channel point mass ``P(Y = 0 | x) = (D/alpha)^p exp(-|x|^p (D^-p - alpha^-p) / 2)``."""
    a, d, p = spec.alpha, spec.D, spec.p
    x = np.asarray(x, dtype=float)
    return (d / a) ** p * np.exp(-np.abs(x) ** p * (d ** (-p) - a ** (-p)) / 2.0)


def gg_joint_distortion(spec):
    """Select-non-zero distortion ``D^(K)`` under the p-th power measure."""
    a, d, p = spec.alpha, spec.D, spec.p
    p0 = gg_prob_all_zero(spec)
    return p0 * (2.0 / p) * a**p * d**p / spec._denominator() + (1.0 - p0) * (2.0 / p) * d**p


def gg_optimal_distortion(spec):
    """Best distortion at the sum-rate ``K log(alpha/D)``: ``(2/p)(D^K alpha^(1-K))^p``."""
    a, d, p, k = spec.alpha, spec.D, spec.p, spec.K
    return (2.0 / p) * (d**k * a ** (1 - k)) ** p


def gg_distortion_redundancy(spec):
    """``D^(K) / D_opt(K R)``."""
    return gg_joint_distortion(spec) / gg_optimal_distortion(spec)


def gg_conditional_distortion(D, p, y=0.0):
    """``E[|X - y|^p | Y = y]`` for the backward noise ``GG(D, p)``, by quadrature."""
    c = gg_constant(p)

    def f(x):
        return c / D * math.exp(-abs(x - y) ** p / (2 * D**p)) * abs(x - y) ** p

    lo, hi = integrate.quad(f, -np.inf, y, epsabs=1e-13, epsrel=1e-12)[0], integrate.quad(f, y, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    return lo + hi


def gg_prob_all_zero_quad(spec):
    """Independent check of :func:`gg_prob_all_zero` by integrating ``P(Y=0|x)^K`` over the source."""
    src = GeneralizedGaussian(spec.alpha, spec.p)

    def f(x):
        return float(gg_prob_zero_given_x(spec, x)) ** spec.K * float(src.pdf(x))

    return 2.0 * integrate.quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-12)[0]


def gg_joint_distortion_mc(spec, trials, seed, chunk=CHUNK_SIZE):
    """Monte-Carlo select-non-zero distortion.

    Zero/non-zero outputs are drawn from the forward point mass. When all
    outputs are zero the error is ``|X|^p``. Otherwise the backward noise is
    independent of the selected output, so the error is a fresh ``GG(D, p)``
    draw. This is exact for ``K = 1``.
    """
    src = GeneralizedGaussian(spec.alpha, spec.p)
    noise = GeneralizedGaussian(spec.D, spec.p)

    def work(index, size, rng):
        x = src.sample(size, rng)
        pz = gg_prob_zero_given_x(spec, x)
        zeros = rng.random((spec.K, size)) < pz
        all_zero = zeros.all(axis=0)
        z = noise.sample(size, rng)
        err = np.where(all_zero, np.abs(x) ** spec.p, np.abs(z) ** spec.p)
        return err.sum()

    return float(np.sum(map_chunks(work, seed, trials, chunk))) / trials


@dataclass(frozen=True)
class SlopeCheck:
    operational: float
    shannon: float
    D: float
    step: float

    @property
    def relative_gap(self):
        return abs(self.operational / self.shannon - 1.0)


def gg_shannon_slope(alpha, p):
    """Zero-rate slope of the sum-rate (nats) against ``D^(K)``: ``-1 / (2 alpha^p)``."""
    return -1.0 / (2.0 * alpha**p)


def gg_slope_check(alpha, p, K, rel_offset=1e-4, step=None):
    """Finite-difference slope of ``(K log(alpha/D), D^(K))`` near ``D = alpha``.

    Both coordinates are differentiated in ``D`` by Richardson-extrapolated
    central differences with steps ``h`` and ``h/2``; the default ``h`` is
    ``rel_offset * alpha / 2`` so the stencil stays inside ``(0, alpha]``.
    """
    D0 = alpha * (1.0 - rel_offset)
    h = rel_offset * alpha / 2.0 if step is None else step
    if h <= 1e-10 * alpha or D0 + h > alpha:
        raise NumericalError("single_round", "gg_slope_check", f"unstable finite-difference step {h}")

    def dk(d):
        return gg_joint_distortion(GGChannelSpec(alpha, p, d, K))

    def central(f, s):
        return (f(D0 + s) - f(D0 - s)) / (2 * s)

    def richardson(f):
        return (4 * central(f, h / 2) - central(f, h)) / 3

    def rate(d):
        return K * math.log(alpha / d)

    return SlopeCheck(
        operational=richardson(rate) / richardson(dk),
        shannon=gg_shannon_slope(alpha, p),
        D=D0,
        step=h,
    )
