"""Parametric sources, samplers and distortion measures.

Every sampler takes an explicit seed (an ``int``, a ``SeedSequence`` or a
ready ``numpy.random.Generator``) so equal seeds give bit-identical draws.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincinv

from .errors import ParameterError

#: Returned by :func:`distortion` when a one-sided measure is violated.
FAILURE = math.inf


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")


def gg_constant(q):
    """Normalising constant ``c_q = q / (2^((q+1)/q) Gamma(1/q))``."""
    _positive("q", q)
    return q / (2.0 ** ((q + 1.0) / q) * gamma_fn(1.0 / q))


@dataclass(frozen=True)
class Gaussian:
    var: float

    def __post_init__(self):
        _positive("var", self.var)

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        return self.var

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * x * x / self.var) / math.sqrt(2 * math.pi * self.var)

    def sample(self, n, seed):
        return math.sqrt(self.var) * _rng(seed).standard_normal(n)


@dataclass(frozen=True)
class OneSidedExp:
    """One-sided exponential source ``f(x) = lam exp(-lam x)`` on ``x >= 0``."""

    lam: float

    def __post_init__(self):
        _positive("lam", self.lam)

    @property
    def mean(self):
        return 1.0 / self.lam

    @property
    def variance(self):
        return 1.0 / self.lam**2

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.lam * np.exp(-self.lam * np.abs(x)), 0.0)

    def sample(self, n, seed):
        return _rng(seed).exponential(1.0 / self.lam, n)


@dataclass(frozen=True)
class GeneralizedGaussian:
    """Zero-mean generalized Gaussian ``(c_p / alpha) exp(-|x|^p / (2 alpha^p))``."""

    alpha: float
    p: float

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("p", self.p)

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        p = self.p
        return self.alpha**2 * 2.0 ** (2.0 / p) * gamma_fn(3.0 / p) / gamma_fn(1.0 / p)

    def abs_moment(self, r):
        """``E|X|^r``."""
        p = self.p
        return self.alpha**r * 2.0 ** (r / p) * gamma_fn((r + 1.0) / p) / gamma_fn(1.0 / p)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return gg_constant(self.p) / self.alpha * np.exp(-np.abs(x) ** self.p / (2 * self.alpha**self.p))

    def sample(self, n, seed):
        rng = _rng(seed)
        if self.p == 1:
            # difference of two unit exponentials is Laplace(1); GG(alpha, 1) has scale 2 alpha
            u1 = rng.random(n)
            u2 = rng.random(n)
            return 2.0 * self.alpha * np.log(u1 / u2)
        # |X|^p / (2 alpha^p) ~ Gamma(1/p): inverse CDF through the regularized incomplete gamma
        w = gammaincinv(1.0 / self.p, rng.random(n))
        sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        return sign * self.alpha * (2.0 * w) ** (1.0 / self.p)


def laplacian(variance=1.0):
    """Laplacian source of the given variance as a p=1 generalized Gaussian."""
    _positive("variance", variance)
    return GeneralizedGaussian(alpha=math.sqrt(variance / 8.0), p=1.0)


@dataclass(frozen=True)
class GaussianMixture:
    """Two-component zero-mean Gaussian mixture ``p0 N(0, var0) + p1 N(0, var1)``."""

    p0: float
    var0: float
    p1: float
    var1: float

    def __post_init__(self):
        _positive("var0", self.var0)
        _positive("var1", self.var1)
        if self.p0 < 0 or self.p1 < 0 or abs(self.p0 + self.p1 - 1.0) > 1e-12:
            raise ParameterError(f"mixture weights must be >= 0 and sum to 1, got {self.p0}, {self.p1}")

    @classmethod
    def balanced(cls, var1, var_x=1.0, share=0.5):
        """Mixture with ``p0 var0 = share * var_x`` and ``p1 var1 = (1 - share) * var_x``."""
        _positive("var1", var1)
        p1 = (1.0 - share) * var_x / var1
        if not 0 < p1 < 1:
            raise ParameterError(f"var1={var1} gives an invalid weight p1={p1}")
        p0 = 1.0 - p1
        return cls(p0=p0, var0=share * var_x / p0, p1=p1, var1=var1)

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        return self.p0 * self.var0 + self.p1 * self.var1

    def pdf(self, x):
        return self.p0 * Gaussian(self.var0).pdf(x) + self.p1 * Gaussian(self.var1).pdf(x)

    def sample_with_indicator(self, n, seed):
        """Draw the component indicator first, then the sample; returns ``(x, s)``."""
        rng = _rng(seed)
        s = (rng.random(n) < self.p1).astype(np.int8)
        scale = np.where(s == 1, math.sqrt(self.var1), math.sqrt(self.var0))
        return scale * rng.standard_normal(n), s

    def sample(self, n, seed):
        return self.sample_with_indicator(n, seed)[0]


@dataclass(frozen=True)
class Uniform:
    """Uniform on ``[-half_width, half_width]``."""

    half_width: float

    def __post_init__(self):
        _positive("half_width", self.half_width)

    @classmethod
    def with_variance(cls, variance=1.0):
        _positive("variance", variance)
        return cls(math.sqrt(3.0 * variance))

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        return self.half_width**2 / 3.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= self.half_width, 0.5 / self.half_width, 0.0)

    def sample(self, n, seed):
        return _rng(seed).uniform(-self.half_width, self.half_width, n)


SourceModel = Gaussian | OneSidedExp | GeneralizedGaussian | GaussianMixture | Uniform


def sample(model, n, seed):
    """``n`` i.i.d. draws from ``model``."""
    if int(n) != n or n < 1:
        raise ParameterError(f"sample count must be a positive integer, got {n!r}")
    return model.sample(int(n), seed)


# -- distortion measures -----------------------------------------------------


@dataclass(frozen=True)
class MSE:
    def pointwise(self, x, y):
        return (x - y) ** 2


@dataclass(frozen=True)
class OneSided:
    """``d(x, y) = x - y`` for ``x >= y`` and infinite otherwise."""

    def pointwise(self, x, y):
        return np.where(x >= y, x - y, np.inf)


@dataclass(frozen=True)
class PthPower:
    p: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ParameterError(f"p-th power distortion needs p >= 1, got {self.p}")

    def pointwise(self, x, y):
        return np.abs(x - y) ** self.p


Absolute = PthPower(1.0)

DistortionMeasure = MSE | OneSided | PthPower


def distortion(measure, x, y):
    """Mean distortion between ``x`` and ``y``; :data:`FAILURE` if a one-sided pair is violated."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ParameterError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size == 0:
        raise ParameterError("empty input")
    if isinstance(measure, OneSided) and np.any(y > x):
        return FAILURE
    return float(np.mean(measure.pointwise(x, y)))


def one_sided_violations(x, y):
    """Number of pairs with ``y > x``."""
    return int(np.count_nonzero(np.asarray(y) > np.asarray(x)))
