"""Conditional I-MMSE expansion and the MMSE-linearity condition.

A pair ``(X, Z)`` is described by the law of ``Z`` (finite, or a
quadrature rule) and the conditional law of ``X`` given each ``Z = z``,
stored centred because mutual information ignores shifts.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ..errors import ParameterError
from ..models import GaussianMixture
from .awgn import AwgnSource, GaussianSource, NodeSource, awgn_source
from .discrete import LOG2E

LINEARITY_TOL = 1e-9


@dataclass(frozen=True)
class CondPair:
    z_probs: np.ndarray
    cond_sources: tuple
    label: str = ""

    def __post_init__(self):
        p = np.asarray(self.z_probs, dtype=float)
        if p.ndim != 1 or p.size != len(self.cond_sources) or np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
            raise ParameterError("z_probs must be a probability vector with one conditional law per entry")
        if not all(isinstance(s, AwgnSource) for s in self.cond_sources):
            raise ParameterError("conditional laws must be AWGN sources")
        object.__setattr__(self, "z_probs", p)

    @property
    def cond_vars(self):
        return np.array([s.second_moment for s in self.cond_sources])

    @property
    def mean_cond_var(self):
        """``var(X|Z) = E_Z[var(X | Z=z)]``."""
        return float(self.z_probs @ self.cond_vars)

    @property
    def mean_sq_cond_var(self):
        """``E_Z[var(X | Z=z)^2]``."""
        return float(self.z_probs @ self.cond_vars**2)

    def mi(self, gamma):
        """``I(X; sqrt(gamma) X + N | Z)`` in bits."""
        return float(sum(p * s.mi(gamma) for p, s in zip(self.z_probs, self.cond_sources)))


def jointly_gaussian(var_x=1.0, rho=0.5, n=32):
    """``(X, Z)`` jointly Gaussian with correlation ``rho``; ``Z`` on a Gauss-Hermite rule."""
    if not -1 <= rho <= 1 or var_x <= 0:
        raise ParameterError("need var_x > 0 and |rho| <= 1")
    _, w = special.roots_hermitenorm(n)
    src = GaussianSource(var_x * (1 - rho**2))
    return CondPair(w / w.sum(), (src,) * n, f"gaussian rho={rho}")


def mixture_indicator(mixture):
    """``Z`` is the component label of a zero-mean Gaussian mixture."""
    if not isinstance(mixture, GaussianMixture):
        raise ParameterError("expected a GaussianMixture")
    return CondPair(
        np.array([mixture.p0, mixture.p1]),
        (GaussianSource(mixture.var0), GaussianSource(mixture.var1)),
        "mixture indicator",
    )


def constant_side_info(source):
    """``Z`` constant: conditioning changes nothing."""
    return CondPair(np.array([1.0]), (awgn_source(source),), "constant")


def full_side_info():
    """``Z = X``: the conditional law is a point mass."""
    return CondPair(np.array([1.0]), (NodeSource(np.array([0.0]), np.array([1.0])),), "Z = X")


def discrete_pair(x_values, pxz):
    """Finite ``(X, Z)`` from a joint table ``pxz[x, z]``."""
    x = np.asarray(x_values, dtype=float)
    pxz = np.asarray(pxz, dtype=float)
    if pxz.shape[0] != x.size or np.any(pxz < 0) or abs(pxz.sum() - 1) > 1e-12:
        raise ParameterError("pxz must be a joint probability table with one row per x value")
    pz = pxz.sum(axis=0)
    keep = pz > 0
    sources = []
    for col in pxz[:, keep].T:
        w = col / col.sum()
        sources.append(NodeSource(x - w @ x, w))
    return CondPair(pz[keep], tuple(sources), "discrete")


@dataclass(frozen=True)
class CondImmse:
    gamma: float
    mi: float
    var_cond: float
    mean_sq_var: float

    @property
    def expansion(self):
        """Two-term expansion with ``var(X|Z)^2`` in the quadratic term."""
        g, v = self.gamma, self.var_cond
        return 0.5 * LOG2E * (g * v - 0.5 * g * g * v * v)

    @property
    def expansion_pointwise(self):
        """Two-term expansion with ``E[var(X|Z=z)^2]`` in the quadratic term."""
        g = self.gamma
        return 0.5 * LOG2E * (g * self.var_cond - 0.5 * g * g * self.mean_sq_var)

    @property
    def residual(self):
        return self.mi - self.expansion

    @property
    def residual_pointwise(self):
        return self.mi - self.expansion_pointwise


def conditional_immse(pair, gamma):
    """Numeric ``I(X;Y|Z)`` and its low-SNR expansions at ``gamma``."""
    if gamma < 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    return CondImmse(gamma, pair.mi(gamma), pair.mean_cond_var, pair.mean_sq_cond_var)


def gaussian_conditional_mi(var_x, rho, gamma):
    """Closed form ``I(X;Y|Z)`` in bits for jointly Gaussian ``(X, Z)``."""
    return 0.5 * math.log1p(gamma * var_x * (1 - rho**2)) * LOG2E


@dataclass(frozen=True)
class LinearityReport:
    mean_sq_var: float
    sq_mean_var: float

    @property
    def gap(self):
        return self.mean_sq_var - self.sq_mean_var

    @property
    def equal(self):
        return abs(self.gap) <= LINEARITY_TOL


def mmse_linearity_condition(pair):
    """Compare ``E[var(X|Z=z)^2]`` with ``var(X|Z)^2``; equal exactly when the conditional variance is constant."""
    return LinearityReport(pair.mean_sq_cond_var, pair.mean_cond_var**2)
