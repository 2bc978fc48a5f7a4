"""Symmetric Gaussian multiple descriptions and the multi-round erasure simulator.

Each round the encoder sends K descriptions of the current residual through
additive Gaussian test channels. A block acknowledgement tells it which
descriptions arrived, and the next round refines what the decoder holds.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import ParameterError
from .rdf import gaussian_rdf


def md_symmetric_rate(var, D, D_all, K):
    """Optimal per-description rate for single-description distortion ``D`` and all-K distortion ``D_all``."""
    if not var > D > D_all > 0:
        raise ParameterError(f"need var > D > D_all > 0, got var={var}, D={D}, D_all={D_all}")
    if int(K) != K or K < 2:
        raise ParameterError(f"K must be an integer >= 2, got {K}")
    first = 0.5 * math.log2((K - 1) * (var - D_all) / (K * (D - D_all)))
    second = math.log2(var * (D - D_all) / ((K - 1) * D_all * (var - D))) / (2 * K)
    return first + second


def independent_noise_endpoint(var, D, K):
    """All-K distortion reached by K independent-noise descriptions of single distortion ``D``."""
    return D / (K - (K - 1) * D / var)


@dataclass(frozen=True)
class MdEfficiency:
    single: float
    full: float
    rate: float


def md_efficiency(var, eps, D_all, K):
    """Efficiencies for one received description and for all K, with ``D = var - eps``."""
    D = var - eps
    R = md_symmetric_rate(var, D, D_all, K)
    return MdEfficiency(single=gaussian_rdf(var, D) / R, full=gaussian_rdf(var, D_all) / (K * R), rate=R)


def uncond_combined_distortion(var, noise_var, K):
    """Wiener distortion from K independent-noise observations: ``var N / (N + K var)``."""
    if not (var > 0 and noise_var > 0 and K >= 1):
        raise ParameterError("variances must be positive and K >= 1")
    return var * noise_var / (noise_var + K * var)


def uncond_sum_rate(var, D_all, K):
    """Sum-rate ``(K/2) log2(var / D_1)`` of independent-noise coding that reaches ``D_all``."""
    if not 0 < D_all < var:
        raise ParameterError(f"D_all must lie in (0, var), got {D_all}")
    noise_var = K * var * D_all / (var - D_all)
    D1 = uncond_combined_distortion(var, noise_var, 1)
    return K * gaussian_rdf(var, D1)


def md_min_sum_rate(var, D_all, K):
    """Smallest MD sum-rate ``K R(D, D_all)`` over the single-description distortion ``D``.

    Returns ``(sum_rate, D_opt)``. The search runs on ``log((D - D_all)/(var - D))``.
    """
    if not 0 < D_all < var:
        raise ParameterError(f"D_all must lie in (0, var), got {D_all}")

    def D_of(u):
        w = 1.0 / (1.0 + math.exp(-u))
        return D_all + w * (var - D_all)

    def f(u):
        return K * md_symmetric_rate(var, D_of(u), D_all, K)

    res = optimize.minimize_scalar(f, bounds=(-40.0, 40.0), method="bounded", options={"xatol": 1e-10})
    return float(res.fun), D_of(res.x)


# -- erasure traces and the feedback simulator -------------------------------


@dataclass(frozen=True)
class IidBernoulli:
    """Each description is lost independently with probability ``p_loss``."""

    p_loss: float
    seed: int

    def __post_init__(self):
        if not 0 <= self.p_loss <= 1:
            raise ParameterError(f"p_loss must lie in [0, 1], got {self.p_loss}")


@dataclass(frozen=True)
class ErasureTrace:
    """Received index sets (0-based) per round."""

    K: int
    received: tuple

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")
        for m, subset in enumerate(self.received):
            s = tuple(subset)
            if len(set(s)) != len(s) or any(int(i) != i or not 0 <= i < self.K for i in s):
                raise ParameterError(f"round {m + 1}: malformed received set {subset!r}")

    @classmethod
    def explicit(cls, K, subsets):
        return cls(K, tuple(tuple(sorted(s)) for s in subsets))

    @classmethod
    def all_received(cls, K, M):
        return cls(K, tuple(tuple(range(K)) for _ in range(M)))

    @classmethod
    def from_model(cls, K, M, model):
        rng = np.random.default_rng(model.seed)
        arrived = rng.random((M, K)) >= model.p_loss
        return cls(K, tuple(tuple(int(i) for i in np.flatnonzero(row)) for row in arrived))

    @property
    def M(self):
        return len(self.received)

    @property
    def counts(self):
        return np.array([len(s) for s in self.received], dtype=int)


@dataclass
class FeedbackRunRecord:
    k: np.ndarray
    D: np.ndarray
    transmitted: np.ndarray
    received: np.ndarray
    var: float
    meta: dict = field(default_factory=dict)

    @property
    def final_distortion(self):
        return float(self.D[-1]) if len(self.D) else self.var

    @property
    def received_rate(self):
        return float(self.received[-1]) if len(self.received) else 0.0

    @property
    def transmitted_rate(self):
        return float(self.transmitted[-1]) if len(self.transmitted) else 0.0

    def received_excess(self):
        """Received sum-rate minus the Gaussian RDF at the final distortion."""
        return self.received_rate - gaussian_rdf(self.var, self.final_distortion)


def _round_rates(r, M):
    rates = np.broadcast_to(np.asarray(r, dtype=float), (M,)).copy() if np.ndim(r) == 0 else np.asarray(r, dtype=float)
    if rates.shape != (M,):
        raise ParameterError(f"need one rate per round ({M}), got {rates.shape}")
    if np.any(rates <= 0):
        raise ParameterError("per-round rates must be positive")
    return rates


def run_feedback_simulation(var, K, M, r, trace, mode="analytic", samples=100_000, seed=0):
    """Simulate M feedback rounds.

    ``r`` is a per-description rate in bits, either one value or one per
    round. In ``"analytic"`` mode the residual variance follows
    ``D_m = 1 / (1/D_{m-1} + k_m gamma_m)``. In ``"sample"`` mode the same
    test channels act on ``samples`` Gaussian draws and ``D`` holds the
    empirical mean-squared error.
    """
    if not var > 0:
        raise ParameterError(f"variance must be positive, got {var}")
    if not isinstance(trace, ErasureTrace) or trace.K != K or trace.M != M:
        raise ParameterError("trace must be an ErasureTrace with matching K and M")
    if mode not in ("analytic", "sample"):
        raise ParameterError(f"unknown mode {mode!r}")
    rates = _round_rates(r, M)
    k = trace.counts
    D = np.empty(M)
    D_prev = var
    if mode == "sample":
        rng = np.random.default_rng(seed)
        x = math.sqrt(var) * rng.standard_normal(samples)
        xhat = np.zeros(samples)
    for m in range(M):
        d = D_prev * 2.0 ** (-2.0 * rates[m])
        gamma = (D_prev - d) / (d * D_prev)
        D_next = 1.0 / (1.0 / D_prev + k[m] * gamma)
        if mode == "sample":
            residual = x - xhat
            noise = rng.standard_normal((K, samples)) / math.sqrt(gamma)
            got = list(trace.received[m])
            if got:
                y = residual + noise[got]
                xhat = xhat + D_next * gamma * y.sum(axis=0)
            D[m] = float(np.mean((x - xhat) ** 2))
        else:
            D[m] = D_next
        D_prev = D_next
    return FeedbackRunRecord(
        k=k,
        D=D,
        transmitted=np.cumsum(K * rates),
        received=np.cumsum(k * rates),
        var=var,
        meta={"mode": mode, "full_erasure": "retransmit new encodings of the unchanged residual"},
    )
