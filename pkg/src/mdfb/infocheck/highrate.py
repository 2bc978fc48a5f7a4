"""Rate-loss of the additive RDF near zero rate and the Gaussian-worst high-rate bound."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from ..errors import NumericalError, ParameterError
from ..models import Gaussian, GaussianMixture, GeneralizedGaussian, Uniform
from ..multi_round import DbUniform, RoundPlan, run_gaussian_trajectory
from .awgn import awgn_source

LN2 = math.log(2.0)


# -- mixture rate loss -----------------------------------------------------------


def _water_level(probs, variances, D):
    """Reverse water-filling level ``theta`` with ``sum P_i min(theta, var_i) = D``."""
    probs = np.asarray(probs, dtype=float)
    variances = np.asarray(variances, dtype=float)
    total = float(probs @ variances)
    if not 0 < D <= total:
        raise ParameterError(f"D must lie in (0, {total}], got {D}")
    order = np.argsort(variances)
    p, v = probs[order], variances[order]
    # D(theta) is piecewise linear: components below theta contribute P_i var_i, the rest P_i theta
    below = 0.0
    for i in range(v.size):
        above = float(p[i:].sum())
        if below + above * v[i] >= D:
            return (D - below) / above
        below += p[i] * v[i]
    return float(v[-1])


def conditional_rdf(mixture, D):
    """RDF of the mixture in bits when encoder and decoder know the component label."""
    probs = (mixture.p0, mixture.p1)
    variances = (mixture.var0, mixture.var1)
    theta = _water_level(probs, variances, D)
    return float(sum(p * max(0.0, 0.5 * math.log2(v / theta)) for p, v in zip(probs, variances)))


def conditional_rdf_slope(mixture, D):
    """``dR/dD = -1 / (2 ln2 theta)`` at the water level of ``D``."""
    return -1.0 / (2 * LN2 * _water_level((mixture.p0, mixture.p1), (mixture.var0, mixture.var1), D))


def additive_rate(source, D):
    """Additive-channel rate: ``I(gamma)`` at the ``gamma`` with ``mmse(gamma) = D``."""
    src = awgn_source(source)
    var = src.second_moment
    if not 0 < D < var:
        raise ParameterError(f"D must lie in (0, {var}), got {D}")
    hi = 1e-3
    while src.mmse(hi) > D:
        hi *= 4
        if hi > 1e8:
            raise NumericalError("infocheck", "additive_rate", "could not bracket the SNR")
    gamma = optimize.brentq(lambda g: src.mmse(g) - D, 0.0, hi, xtol=1e-15, rtol=1e-13)
    return src.mi(gamma), gamma


@dataclass(frozen=True)
class MixtureRateLoss:
    var1: float
    D: float
    r_add: float
    r_cond: float
    gamma: float

    @property
    def ratio(self):
        return self.r_add / self.r_cond


def mixture_rate_loss(var1_grid=(10.0, 100.0, 1000.0), D=1 - 1e-3, share=0.5):
    """``R_add / R_cond`` at ``D`` for balanced unit-variance mixtures with second variance ``var1``."""
    out = []
    for v1 in var1_grid:
        mix = GaussianMixture.balanced(v1, 1.0, share)
        r_add, gamma = additive_rate(mix, D)
        out.append(MixtureRateLoss(float(v1), D, r_add, conditional_rdf(mix, D), gamma))
    return out


# -- Gaussian-worst bound --------------------------------------------------------


def _entropy_bits(pdf, support, points):
    """``-int f log2 f`` over ``[-support, support]`` for a symmetric density."""

    def integrand(y):
        f = pdf(y)
        return -f * math.log2(f) if f > 0 else 0.0

    val, err = integrate.quad(integrand, 0.0, support, points=points, epsabs=1e-13, epsrel=1e-12, limit=800)
    if not math.isfinite(val) or err > 1e-9:
        raise NumericalError("infocheck", "gaussian_worst_bound", f"entropy quadrature did not converge (error {err})")
    return 2 * val


def _laplace_plus_noise_pdf(b, s):
    def tail(y):
        u = (s / b - y / s) / math.sqrt(2)
        if u >= 0:
            return math.exp(-0.5 * (y / s) ** 2) * special.erfcx(u)
        return math.exp(0.5 * (s / b) ** 2 - y / b) * special.erfc(u)

    return lambda y: (tail(y) + tail(-y)) / (4 * b)


def _uniform_plus_noise_pdf(a, s):
    def pdf(y):
        y = abs(y)
        return (special.ndtr((a - y) / s) - special.ndtr((-a - y) / s)) / (2 * a)

    return pdf


def differential_entropy(source):
    """``h(X)`` in bits for Gaussian, Laplacian and uniform sources."""
    if isinstance(source, Gaussian):
        return 0.5 * math.log2(2 * math.pi * math.e * source.var)
    if isinstance(source, GeneralizedGaussian) and source.p == 1:
        return math.log2(2 * math.e * 2 * source.alpha)
    if isinstance(source, Uniform):
        return math.log2(2 * source.half_width)
    raise ParameterError(f"no differential entropy available for {source!r}")


def noisy_entropy(source, D):
    """``h(X + N)`` in bits, ``N ~ N(0, D)`` independent of ``X``."""
    s = math.sqrt(D)
    if isinstance(source, Gaussian):
        return 0.5 * math.log2(2 * math.pi * math.e * (source.var + D))
    if isinstance(source, GeneralizedGaussian) and source.p == 1:
        b = 2 * source.alpha
        return _entropy_bits(_laplace_plus_noise_pdf(b, s), 60 * b + 40 * s, [s, 5 * s, b, 10 * b])
    if isinstance(source, Uniform):
        a = source.half_width
        return _entropy_bits(_uniform_plus_noise_pdf(a, s), a + 40 * s, [max(a - 5 * s, 0.0), a, a + 5 * s])
    raise ParameterError(f"no noisy entropy available for {source!r}")


@dataclass(frozen=True)
class GaussianWorstBound:
    """Both sides of the high-rate inequality at ``(D1, D2)``.

    ``gaussian_excess`` is the UIR excess rate of a Gaussian source of
    variance ``D1`` refined to ``D2``. For another source the RDF
    increment lies in ``[L - slack_lower, L + slack_upper]`` with
    ``L = log2(D1/D2) / 2``, ``slack_lower = h(X + N1) - h(X)`` and
    ``slack_upper = h(X + N2) - h(X)``. Spending the Gaussian rate, the
    source's excess therefore lies in
    ``[gaussian_excess - slack_upper, gaussian_excess + slack_lower]``.
    """

    D1: float
    D2: float
    gaussian_excess: float
    slack_lower: float
    slack_upper: float

    @property
    def margin(self):
        """Inequality margin with the upper RDF bound; ``>= 0`` by construction."""
        return self.slack_upper

    @property
    def worst_margin(self):
        """Margin with the Shannon lower bound; ``<= 0`` and vanishing at high rate."""
        return -self.slack_lower


def gaussian_worst_bound(source, D1, D2, K=2, M=2):
    """Evaluate the Gaussian-worst inequality for ``source`` between ``D1`` and ``D2``."""
    var = source.variance
    if not 0 < D2 < D1 <= var:
        raise ParameterError(f"need 0 < D2 < D1 <= var, got D1={D1}, D2={D2}, var={var}")
    plan = RoundPlan(K=K, M=M, schedule=DbUniform(D2), var=D1)
    excess = run_gaussian_trajectory(plan).total_rate - 0.5 * math.log2(D1 / D2)
    if isinstance(source, Gaussian):
        # the RDF increment is exactly log2(D1/D2)/2, both slacks vanish
        return GaussianWorstBound(D1, D2, excess, 0.0, 0.0)
    h = differential_entropy(source)
    return GaussianWorstBound(D1, D2, excess, noisy_entropy(source, D1) - h, noisy_entropy(source, D2) - h)
