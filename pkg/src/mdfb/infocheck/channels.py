"""Very noisy continuous-input, binary-output channels of the epsilon/1 kind.

The fixed family: standard Gaussian ``X``;
``P(Y=1 | x) = Phi((x - t) / s)`` and ``P(Z=1 | x) = Phi((-x - t) / s)``,
soft threshold detectors on opposite tails. The threshold ``t`` is set so
both outputs equal 0 with probability ``1 - eps``. ``Y`` and ``Z`` are
conditionally independent given ``X``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from ..errors import NumericalError, ParameterError
from .discrete import LOG2E, kl_terms

EPS1_SOFTNESS = 0.5
_SPAN = 12.0


def _phi(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


def _quad(fn, points):
    val, err = integrate.quad(fn, -_SPAN, _SPAN, points=points, epsabs=1e-16, epsrel=1e-11, limit=500)
    if not math.isfinite(val) or err > 1e-12 + 1e-7 * abs(val):
        raise NumericalError("infocheck", "eps1_ratio", f"quadrature did not converge (value {val}, error {err})")
    return val


@dataclass(frozen=True)
class Eps1Family:
    """The soft opposite-tail detector pair at rare-symbol probability ``eps``."""

    eps: float
    softness: float = EPS1_SOFTNESS

    def __post_init__(self):
        if not 0 <= self.eps < 0.5:
            raise ParameterError(f"eps must lie in [0, 0.5), got {self.eps}")
        if not self.softness > 0:
            raise ParameterError(f"softness must be positive, got {self.softness}")

    @property
    def threshold(self):
        return math.sqrt(1 + self.softness**2) * -special.ndtri(self.eps)

    def _p1(self, x, sign):
        """``P(out = 1 | x)`` and ``P(out = 0 | x)`` for the detector on the ``sign`` tail."""
        u = (sign * x - self.threshold) / self.softness
        return special.ndtr(u), special.ndtr(-u)

    def mi_single(self):
        """``I(X; Y)`` in bits (equal to ``I(X; Z)`` by symmetry)."""
        e = self.eps

        def f(x):
            p1, p0 = self._p1(x, 1)
            return _phi(x) * (e * kl_terms(p1 / e - 1) + (1 - e) * kl_terms((e - p1) / (1 - e)))

        return _quad(f, [-self.threshold, 0.0, self.threshold]) * LOG2E

    def _pair_marginal(self):
        pts = [-self.threshold, 0.0, self.threshold]
        p11 = _quad(lambda x: _phi(x) * self._p1(x, 1)[0] * self._p1(x, -1)[0], pts)
        e = self.eps
        # P(Y=1, Z=0) = eps - P(1,1); P(0,0) = 1 - 2 eps + P(1,1)
        return {(1, 1): p11, (1, 0): e - p11, (0, 1): e - p11, (0, 0): 1 - 2 * e + p11}

    def mi_joint(self):
        """``I(X; Y, Z)`` in bits."""
        pyz = self._pair_marginal()

        def f(x):
            y1, y0 = self._p1(x, 1)
            z1, z0 = self._p1(x, -1)
            cond = {(1, 1): y1 * z1, (1, 0): y1 * z0, (0, 1): y0 * z1, (0, 0): y0 * z0}
            return _phi(x) * sum(q * kl_terms(cond[k] / q - 1) for k, q in pyz.items())

        return _quad(f, [-self.threshold, 0.0, self.threshold]) * LOG2E

    def mi_yz(self):
        """``I(Y; Z)`` in bits from the output pair marginal."""
        pyz = self._pair_marginal()
        e = self.eps
        py = {1: e, 0: 1 - e}
        q = np.array([py[a] * py[b] for a, b in pyz])
        p = np.array(list(pyz.values()))
        return float(np.sum(q * kl_terms((p - q) / q))) * LOG2E


@dataclass(frozen=True)
class Eps1Point:
    eps: float
    i_xy: float
    i_xz: float
    i_xyz: float

    @property
    def ratio(self):
        den = self.i_xy + self.i_xz
        return 1.0 if den == 0 else self.i_xyz / den


def eps1_ratio(eps, softness=EPS1_SOFTNESS):
    """``I(X; Y, Z) / (I(X; Y) + I(X; Z))`` for the fixed family at ``eps``; 1 by convention at ``eps = 0``."""
    if eps == 0:
        return Eps1Point(0.0, 0.0, 0.0, 0.0)
    fam = Eps1Family(eps, softness)
    i1 = fam.mi_single()
    return Eps1Point(eps, i1, i1, fam.mi_joint())
