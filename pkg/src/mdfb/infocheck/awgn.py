"""Mutual information and MMSE of scalar sources observed through AWGN.

The observation is ``Y = sqrt(gamma) X + N`` with unit-variance Gaussian
``N``. With ``1 + t(y) = p(y) / phi(y)`` the mutual information in nats is

    I = gamma E[X^2] / 2 - int phi(y) f(t(y)) dy,   f(t) = (1 + t) log(1 + t) - t,

which keeps full relative precision at small ``gamma``. The ratio
``p(y) / phi(y)`` is a finite sum of exponentials: a quadrature rule over
``X`` for discrete, uniform and Laplacian sources, or one term per
component for Gaussian mixtures. Sums are taken in log space.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, special

from ..errors import NumericalError, ParameterError
from ..models import Gaussian, GaussianMixture, GeneralizedGaussian, Uniform
from .discrete import LOG2E, kl_terms

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-11
Y_SPAN = 60.0


def _quad(fn, lo, hi, op, points=None):
    val, err = integrate.quad(fn, lo, hi, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=500, points=points)
    if not math.isfinite(val) or err > 1e-8 + 1e-6 * abs(val):
        raise NumericalError("infocheck", op, f"quadrature did not converge (value {val}, error {err})")
    return val


class AwgnSource:
    """Base class: ``second_moment`` plus ``components(y, gamma)`` in log space."""

    second_moment: float

    def components(self, y, gamma):
        """Return ``(logw, mu)``, shape ``(k, len(y))``.

        ``p(y) / phi(y) = sum_k exp(logw_k)`` and
        ``E[X | Y=y] = sum_k exp(logw_k) mu_k / sum_k exp(logw_k)``.
        """
        raise NotImplementedError

    def _log_ratio_and_mean(self, y, gamma):
        logw, mu = self.components(np.atleast_1d(np.asarray(y, dtype=float)), gamma)
        L = special.logsumexp(logw, axis=0)
        post = np.exp(logw - L)
        return L, np.sum(post * mu, axis=0)

    def mi(self, gamma):
        """``I(X; sqrt(gamma) X + N)`` in bits."""
        if gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {gamma}")
        if gamma == 0:
            return 0.0

        def integrand(y):
            L = float(self._log_ratio_and_mean(y, gamma)[0][0])
            phi = math.exp(-0.5 * y * y) / math.sqrt(2 * math.pi)
            if abs(L) < 1.0:
                return phi * float(kl_terms(math.expm1(L)))
            return math.exp(L - 0.5 * y * y) / math.sqrt(2 * math.pi) * (L - 1.0) + phi

        div = _quad(integrand, -Y_SPAN, Y_SPAN, "mi", points=self._breakpoints(gamma))
        return (0.5 * gamma * self.second_moment - div) * LOG2E

    def mmse(self, gamma):
        """Minimum mean-squared error of ``X`` from ``sqrt(gamma) X + N``."""
        if gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {gamma}")

        def integrand(y):
            L, m = self._log_ratio_and_mean(y, gamma)
            return math.exp(L[0] - 0.5 * y * y) / math.sqrt(2 * math.pi) * m[0] ** 2

        return self.second_moment - _quad(integrand, -Y_SPAN, Y_SPAN, "mmse", points=self._breakpoints(gamma))

    def _breakpoints(self, gamma):
        return [-5.0, 0.0, 5.0]


@dataclass(frozen=True)
class GaussianSource(AwgnSource):
    """Gaussian ``X`` with closed-form MI and MMSE."""

    var: float = 1.0

    @property
    def second_moment(self):
        return self.var

    def components(self, y, gamma):
        s = gamma * self.var
        return (-0.5 * math.log1p(s) + 0.5 * y**2 * s / (1 + s))[None, :], (math.sqrt(gamma) * self.var * y / (1 + s))[None, :]

    def mi(self, gamma):
        if gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {gamma}")
        return 0.5 * math.log1p(gamma * self.var) * LOG2E

    def mmse(self, gamma):
        if gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {gamma}")
        return self.var / (1 + gamma * self.var)


@dataclass(frozen=True)
class NodeSource(AwgnSource):
    """``X`` given by nodes and weights, exact for discrete laws, a quadrature rule otherwise."""

    nodes: np.ndarray
    weights: np.ndarray
    name: str = "discrete"

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if x.shape != w.shape or x.ndim != 1 or np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise ParameterError("nodes and weights must be matching 1-D arrays with weights summing to 1")
        keep = w > 0
        object.__setattr__(self, "nodes", x[keep])
        object.__setattr__(self, "weights", w[keep])

    @cached_property
    def second_moment(self):
        return float(np.sum(self.weights * self.nodes**2))

    @cached_property
    def _logw(self):
        return np.log(self.weights)

    def components(self, y, gamma):
        x = self.nodes[:, None]
        sg = math.sqrt(gamma)
        logw = self._logw[:, None] + sg * x * y[None, :] - 0.5 * gamma * x**2
        return logw, np.broadcast_to(x, logw.shape)

    def _breakpoints(self, gamma):
        scale = math.sqrt(gamma) * float(np.abs(self.nodes).max()) if self.name == "discrete" else 0.0
        return sorted({-5.0, 0.0, 5.0, -scale, scale})


@dataclass(frozen=True)
class MixtureSource(AwgnSource):
    """Zero-mean Gaussian mixture, one log-space term per component."""

    probs: tuple
    variances: tuple

    @property
    def second_moment(self):
        return float(np.dot(self.probs, self.variances))

    def components(self, y, gamma):
        p = np.asarray(self.probs, dtype=float)[:, None]
        v = np.asarray(self.variances, dtype=float)[:, None]
        s = gamma * v
        logw = np.log(p) - 0.5 * np.log1p(s) + 0.5 * y[None, :] ** 2 * s / (1 + s)
        mu = math.sqrt(gamma) * v * y[None, :] / (1 + s)
        return logw, mu

    def _breakpoints(self, gamma):
        sd = math.sqrt(1 + gamma * max(self.variances))
        return sorted({-5.0 * sd, 0.0, 5.0 * sd} | {-5.0, 5.0})


def binary_source(amplitude=1.0):
    """Equiprobable ``+-amplitude``."""
    return NodeSource(np.array([-amplitude, amplitude]), np.array([0.5, 0.5]), "discrete")


def uniform_source(half_width=math.sqrt(3.0), n=200):
    """Uniform on ``[-a, a]`` via Gauss-Legendre nodes."""
    x, w = special.roots_legendre(n)
    return NodeSource(half_width * x, w / 2.0, "uniform")


def laplacian_source(variance=1.0, n=200):
    """Laplacian of the given variance via Gauss-Laguerre nodes on each half-line."""
    b = math.sqrt(variance / 2.0)
    u, w = special.roots_laguerre(n)
    return NodeSource(np.concatenate([-b * u[::-1], b * u]), np.concatenate([w[::-1], w]) / 2.0, "laplacian")


def awgn_source(model):
    """Adapter from :mod:`mdfb.models` source laws."""
    if isinstance(model, AwgnSource):
        return model
    if isinstance(model, Gaussian):
        return GaussianSource(model.var)
    if isinstance(model, GaussianMixture):
        return MixtureSource((model.p0, model.p1), (model.var0, model.var1))
    if isinstance(model, Uniform):
        return uniform_source(model.half_width)
    if isinstance(model, GeneralizedGaussian):
        if model.p == 2:
            return GaussianSource(model.variance)
        if model.p == 1:
            return laplacian_source(model.variance)
    raise ParameterError(f"no AWGN quadrature available for {model!r}")


@dataclass(frozen=True)
class AwgnTestChannel:
    """``K`` conditionally independent branches ``Y_i = sqrt(gamma) X + N_i``."""

    source: AwgnSource
    gamma: float = 1.0
    K: int = 1

    def __post_init__(self):
        if self.gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {self.gamma}")
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")
        object.__setattr__(self, "source", awgn_source(self.source))

    def mi(self, gamma=None):
        """``I(X; Y_0, ..., Y_{K-1})`` in bits via the branch-mean statistic."""
        g = self.gamma if gamma is None else gamma
        return self.source.mi(self.K * g)

    def mmse(self, gamma=None):
        g = self.gamma if gamma is None else gamma
        return self.source.mmse(self.K * g)

    def low_snr_expansion(self, gamma=None):
        """Two-term expansion ``K s gamma log2e / 2 - K^2 s^2 gamma^2 log2e / 4``, ``s = E[X^2]``."""
        g = self.gamma if gamma is None else gamma
        s = self.source.second_moment
        return (self.K * s * g / 2 - (self.K * s * g) ** 2 / 4) * LOG2E


# -- I-MMSE ---------------------------------------------------------------------


def central_difference(fn, x, h):
    return (fn(x + h) - fn(x - h)) / (2 * h)


def richardson_derivative(fn, x, h):
    """Fourth-order derivative from central differences at ``h`` and ``h/2``."""
    return (4 * central_difference(fn, x, h / 2) - central_difference(fn, x, h)) / 3


@dataclass(frozen=True)
class ImmseReport:
    gamma: np.ndarray
    derivative: np.ndarray
    target: np.ndarray

    @property
    def relative_errors(self):
        return np.abs(self.derivative - self.target) / np.abs(self.target)

    @property
    def max_relative_error(self):
        return float(self.relative_errors.max())


def immse_check(channel, gammas=(0.1, 0.5, 1.0), step=1e-3, richardson=True):
    """Compare ``dI/dgamma`` with ``(log2 e / 2) mmse(gamma)`` for one branch of ``channel``."""
    src = channel.source
    g = np.asarray(gammas, dtype=float)
    if np.any(g - step <= 0):
        raise NumericalError("infocheck", "immse_check", "finite-difference stencil leaves gamma > 0")
    diff = richardson_derivative if richardson else central_difference
    deriv = np.array([diff(src.mi, x, step) for x in g])
    target = np.array([0.5 * LOG2E * src.mmse(x) for x in g])
    return ImmseReport(g, deriv, target)


# -- noisy oversampling -----------------------------------------------------------


def _gh_grid(K, n):
    x, w = special.roots_hermitenorm(n)
    w = w / math.sqrt(2 * math.pi)
    grids = np.meshgrid(*([x] * K), indexing="ij")
    wts = np.ones_like(grids[0])
    for ax in range(K):
        wts = wts * w.reshape([-1 if i == ax else 1 for i in range(K)])
    return np.stack([gr.ravel() for gr in grids]), wts.ravel()


def oversampled_mi_direct(source, noise_vars, n=48):
    """``I(X; X + N_0, ..., X + N_{K-1})`` in bits without any sufficient-statistic reduction.

    Gaussian ``X`` uses the covariance determinant; discrete ``X`` uses a
    tensor Gauss-Hermite rule over the ``K`` noises.
    """
    s = np.asarray(noise_vars, dtype=float)
    if s.ndim != 1 or s.size < 1 or np.any(s <= 0):
        raise ParameterError("noise variances must be a non-empty vector of positive values")
    if isinstance(source, GaussianSource):
        cov_y = source.var * np.ones((s.size, s.size)) + np.diag(s)
        _, logdet = np.linalg.slogdet(cov_y)
        return 0.5 * (logdet - float(np.sum(np.log(s)))) * LOG2E
    if not (isinstance(source, NodeSource) and source.name == "discrete"):
        raise ParameterError("direct oversampled MI needs a Gaussian or discrete source")
    z, wz = _gh_grid(s.size, n)
    noise = np.sqrt(s)[:, None] * z
    x, px = source.nodes, source.weights
    total = 0.0
    stat = np.sum(noise / s[:, None], axis=0)
    prec = float(np.sum(1.0 / s))
    for xi, pi in zip(x, px):
        d = (x - xi)[:, None]
        expo = d * stat[None, :] - 0.5 * d**2 * prec  # log p(y|x') - log p(y|xi) at y = xi + noise
        total -= pi * float(np.sum(wz * special.logsumexp(expo, axis=0, b=px[:, None])))
    return total * LOG2E


@dataclass(frozen=True)
class OversamplingReport:
    direct: float
    reduced: float

    @property
    def residual(self):
        return abs(self.direct - self.reduced)


def oversampling_identity(channel, noise_vars=None, n=48):
    """Compare ``I(X; X + N_i, i < K)`` with the one-branch channel at the summed SNR.

    By default every branch has noise variance ``1 / gamma``; heterogeneous
    ``noise_vars`` are accepted, the reduced side then uses ``sum_i 1/var_i``.
    """
    if noise_vars is None:
        if channel.gamma <= 0:
            raise ParameterError("oversampling needs gamma > 0")
        noise_vars = np.full(channel.K, 1.0 / channel.gamma)
    s = np.asarray(noise_vars, dtype=float)
    direct = oversampled_mi_direct(channel.source, s, n=n)
    reduced = channel.source.mi(float(np.sum(1.0 / s)))
    return OversamplingReport(direct, reduced)


# -- additive RDF ------------------------------------------------------------------


@dataclass(frozen=True)
class SlopeReport:
    gamma: float
    slope: float
    limit: float

    @property
    def relative_gap(self):
        return abs(self.slope / self.limit - 1.0)


def additive_rdf_slope(source, gamma=1e-3, step=None):
    """Slope ``dI/dD`` of the parametric curve ``(mmse(gamma), I(gamma))`` near ``gamma = 0``."""
    src = awgn_source(source)
    h = gamma / 4 if step is None else step
    if gamma - h <= 0:
        raise NumericalError("infocheck", "additive_rdf_slope", "step must be smaller than gamma")
    dI = richardson_derivative(src.mi, gamma, h)
    dD = richardson_derivative(src.mmse, gamma, h)
    if dD == 0:
        raise NumericalError("infocheck", "additive_rdf_slope", "mmse derivative vanished")
    return SlopeReport(gamma, dI / dD, -LOG2E / (2 * src.second_moment))
