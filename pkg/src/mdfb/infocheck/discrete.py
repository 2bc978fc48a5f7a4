"""Exact mutual information on finite alphabets and very noisy channel (VNC) families.

Mutual information is evaluated in the nonnegative form
``I = sum q f(t)`` with ``q`` the product of marginals, ``t = p/q - 1`` and
``f(t) = (1 + t) log(1 + t) - t``. For VNC families ``t`` is formed
symbolically in ``eps``, so quantities of order ``eps^4`` keep full
relative precision.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ..errors import ParameterError

LOG2E = 1.0 / math.log(2.0)
_ROW_TOL = 1e-12


def kl_terms(t):
    """``f(t) = (1 + t) log1p(t) - t`` in nats, with a series for small ``|t|``."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1e-3
    ts = np.where(small, t, 0.0)
    series = ts**2 / 2 - ts**3 / 6 + ts**4 / 12 - ts**5 / 20
    tl = np.where(small, 0.0, t)
    big = special.xlog1py(1 + tl, tl) - tl
    return np.where(small, series, big)


def _mi(q, t):
    return float(np.sum(q * kl_terms(t))) * LOG2E


def _check_stochastic(name, table, rows_axis=1):
    table = np.asarray(table, dtype=float)
    if np.any(table < 0):
        raise ParameterError(f"{name} has negative entries")
    if np.any(np.abs(table.sum(axis=rows_axis) - 1.0) > _ROW_TOL):
        raise ParameterError(f"{name} rows must sum to 1")
    return table


@dataclass(frozen=True)
class DiscreteJoint:
    """Markov chain ``Y - X - Z`` given by ``P_X``, ``P_{Y|X}`` and ``P_{Z|X}``."""

    px: np.ndarray
    py_x: np.ndarray
    pz_x: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.px, dtype=float)
        if np.any(px < 0) or abs(px.sum() - 1.0) > _ROW_TOL:
            raise ParameterError("P_X must be a probability vector")
        py = _check_stochastic("P_{Y|X}", self.py_x)
        pz = _check_stochastic("P_{Z|X}", self.pz_x)
        if py.shape[0] != px.size or pz.shape[0] != px.size:
            raise ParameterError("channel tables must have one row per input symbol")
        object.__setattr__(self, "px", px)
        object.__setattr__(self, "py_x", py)
        object.__setattr__(self, "pz_x", pz)

    @property
    def py(self):
        return self.px @ self.py_x

    @property
    def pz(self):
        return self.px @ self.pz_x

    def pyz(self):
        return np.einsum("x,xy,xz->yz", self.px, self.py_x, self.pz_x)


def _pair_terms(p_ab, pa, pb):
    q = np.outer(pa, pb)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(q > 0, (p_ab - q) / q, 0.0)
    return q, t


def mi_discrete(joint, pair):
    """Exact mutual information in bits; ``pair`` is one of ``"XY"``, ``"XZ"``, ``"YZ"``, ``"X;YZ"``."""
    px = joint.px
    if pair == "XY":
        return _mi(*_pair_terms(px[:, None] * joint.py_x, px, joint.py))
    if pair == "XZ":
        return _mi(*_pair_terms(px[:, None] * joint.pz_x, px, joint.pz))
    if pair == "YZ":
        return _mi(*_pair_terms(joint.pyz(), joint.py, joint.pz))
    if pair == "X;YZ":
        pyz = joint.pyz().ravel()
        pxyz = (px[:, None, None] * joint.py_x[:, :, None] * joint.pz_x[:, None, :]).reshape(px.size, -1)
        return _mi(*_pair_terms(pxyz, px, pyz))
    raise ParameterError(f"unknown pair {pair!r}")


# -- very noisy channels -------------------------------------------------------


@dataclass(frozen=True)
class VncFamily:
    """``P_{Y|X} = P_Y (1 + eps psi_Y)`` and ``P_{Z|X} = P_Z (1 + eps psi_Z)`` with zero-mean perturbations."""

    px: np.ndarray
    py_base: np.ndarray
    psi_y: np.ndarray
    pz_base: np.ndarray
    psi_z: np.ndarray

    def __post_init__(self):
        for base, psi, name in ((self.py_base, self.psi_y, "psi_Y"), (self.pz_base, self.psi_z, "psi_Z")):
            mean = np.asarray(psi) @ np.asarray(base)
            if np.any(np.abs(mean) > 1e-12):
                raise ParameterError(f"{name} violates sum_y P(y) psi(y|x) = 0 (max {np.abs(mean).max():.2e})")

    def max_eps(self):
        m = max(np.abs(self.psi_y).max(), np.abs(self.psi_z).max())
        return math.inf if m == 0 else 1.0 / m

    def joint(self, eps):
        """The family member at ``eps`` as explicit tables."""
        return DiscreteJoint(
            self.px,
            self.py_base[None, :] * (1 + eps * self.psi_y),
            self.pz_base[None, :] * (1 + eps * self.psi_z),
        )

    def limit_constant(self):
        """``(1/2) sum_y P_Y sum_x P_X eta^2`` in bits, ``eta = psi - E_X psi``."""
        eta = self.psi_y - self.px @ self.psi_y
        return 0.5 * float(np.sum(self.py_base[None, :] * self.px[:, None] * eta**2)) * LOG2E

    def mi(self, eps, pair):
        """Mutual information in bits with ``t`` formed symbolically in ``eps``."""
        if not 0 <= eps <= self.max_eps():
            raise ParameterError(f"eps={eps} outside the valid range")
        px, py, pz = self.px, self.py_base, self.pz_base
        sy, sz = self.psi_y, self.psi_z
        my, mz = px @ sy, px @ sz  # psi' of the output marginals
        if pair in ("XY", "XZ"):
            base, s, m = (py, sy, my) if pair == "XY" else (pz, sz, mz)
            q = px[:, None] * base[None, :] * (1 + eps * m)[None, :]
            t = eps * (s - m[None, :]) / (1 + eps * m)[None, :]
            return _mi(q, t)
        cross = np.einsum("x,xy,xz->yz", px, sy, sz)  # E_X[psi_Y psi_Z]
        denom_y, denom_z = 1 + eps * my, 1 + eps * mz
        if pair == "YZ":
            q = np.outer(py * denom_y, pz * denom_z)
            t = eps**2 * (cross - np.outer(my, mz)) / np.outer(denom_y, denom_z)
            return _mi(q, t)
        if pair == "X;YZ":
            pyz = np.outer(py, pz) * (1 + eps * (my[:, None] + mz[None, :]) + eps**2 * cross)
            num = (
                eps * (sy[:, :, None] + sz[:, None, :] - my[None, :, None] - mz[None, None, :])
                + eps**2 * (sy[:, :, None] * sz[:, None, :] - cross[None, :, :])
            )
            t = num / (pyz / np.outer(py, pz))[None, :, :]
            q = px[:, None, None] * pyz[None, :, :]
            return _mi(q, t)
        raise ParameterError(f"unknown pair {pair!r}")


def project_psi(psi, base):
    """Remove the ``base``-weighted mean per input row so ``sum_y base(y) psi(y|x) = 0``."""
    psi = np.asarray(psi, dtype=float)
    return psi - (psi @ base)[:, None]


def random_vnc_family(nx, ny, nz, seed):
    """Random VNC family with projected perturbations scaled so ``max |psi| = 1``."""
    rng = np.random.default_rng(seed)
    px = rng.dirichlet(np.ones(nx))
    py = rng.dirichlet(np.ones(ny))
    pz = rng.dirichlet(np.ones(nz))
    sy = project_psi(rng.standard_normal((nx, ny)), py)
    sz = project_psi(rng.standard_normal((nx, nz)), pz)
    return VncFamily(px, py, sy / np.abs(sy).max(), pz, sz / np.abs(sz).max())


@dataclass(frozen=True)
class VncScaling:
    eps: np.ndarray
    i_xy: np.ndarray
    i_yz: np.ndarray
    constant: float

    @property
    def xy_over_eps2(self):
        return self.i_xy / self.eps**2

    @property
    def yz_over_xy(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.i_xy > 0, self.i_yz / self.i_xy, 0.0)

    def yz_over_eps(self, power):
        return self.i_yz / self.eps**power


def vnc_scaling(family, eps_grid=(1e-1, 1e-2, 1e-3, 1e-4)):
    """``I(X;Y)`` and ``I(Y;Z)`` over ``eps_grid`` with the small-eps constant."""
    eps = np.asarray(eps_grid, dtype=float)
    return VncScaling(
        eps=eps,
        i_xy=np.array([family.mi(e, "XY") for e in eps]),
        i_yz=np.array([family.mi(e, "YZ") for e in eps]),
        constant=family.limit_constant(),
    )
