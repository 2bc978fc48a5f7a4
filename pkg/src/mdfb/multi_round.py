"""Multi-round unconditional incremental refinement.

Each round sends K independent descriptions of the current residual. For a
Gaussian source a round with single-description distortion ``d`` takes the
joint distortion from ``D_prev`` to ``d / (K - (K-1) d / D_prev)``. For the
one-sided exponential source the select-max residual stays exponential and
its rate parameter grows by ``1 + K(2^R - 1)`` per round.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .rdf import RatePoint, exp_rdf, gaussian_rdf

LN2 = math.log(2.0)


@dataclass(frozen=True)
class DbUniform:
    """Joint distortions log-uniformly spaced from the source variance to ``D_final``."""

    D_final: float
    name = "db-uniform"


@dataclass(frozen=True)
class EqualRate:
    """Equal per-round rate ``r = log2(var/d) / (2M)``, i.e. one description would end at ``d``."""

    d: float
    name = "equal-rate"


@dataclass(frozen=True)
class RoundPlan:
    K: int
    M: int
    schedule: DbUniform | EqualRate
    var: float = 1.0

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1 or int(self.M) != self.M or self.M < 1:
            raise ParameterError(f"K and M must be positive integers, got K={self.K}, M={self.M}")
        if not self.var > 0:
            raise ParameterError(f"variance must be positive, got {self.var}")
        if isinstance(self.schedule, DbUniform):
            if not 0 < self.schedule.D_final < self.var:
                raise ParameterError(f"D_final must lie in (0, var), got {self.schedule.D_final}")
        elif isinstance(self.schedule, EqualRate):
            if not 0 < self.schedule.d <= self.var:
                raise ParameterError(f"d must lie in (0, var], got {self.schedule.d}")
        else:
            raise ParameterError(f"unknown schedule {self.schedule!r}")


@dataclass
class TrajectoryRecord:
    """Per-round quantities, all arrays of length M (round m at index m - 1)."""

    K: int
    d: np.ndarray
    D: np.ndarray
    rate: np.ndarray
    initial: float
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def M(self):
        return len(self.D)

    @property
    def sum_rate(self):
        """Cumulative sum-rate over all descriptions after each round."""
        return self.K * np.cumsum(self.rate)

    @property
    def final_distortion(self):
        return float(self.D[-1])

    @property
    def total_rate(self):
        return float(self.sum_rate[-1])

    def points(self):
        return [
            RatePoint(float(s), float(D), K=self.K, round=m + 1, label=self.label)
            for m, (s, D) in enumerate(zip(self.sum_rate, self.D))
        ]


def gaussian_round(d, D_prev, K):
    """Joint distortion after one round: ``d / (K - (K - 1) d / D_prev)``."""
    if not 0 < d <= D_prev * (1 + 1e-12):
        raise ParameterError(f"single-description distortion {d} must lie in (0, D_prev={D_prev}]")
    return d / (K - (K - 1) * d / D_prev)


def gaussian_round_inverse(D_m, D_prev, K):
    """Single-description distortion that yields ``D_m``: ``K D_m D_prev / (D_prev + (K - 1) D_m)``."""
    if not 0 < D_m <= D_prev * (1 + 1e-12):
        raise ParameterError(f"joint distortion {D_m} must lie in (0, D_prev={D_prev}]")
    return K * D_m * D_prev / (D_prev + (K - 1) * D_m)


def _log_step_ratio(L, M, K):
    """``log(D_m / D_{m-1})`` for the equal-rate schedule with ``L = log(d / var)``."""
    # c = exp(L/M); ratio = c / (K - (K-1)c) = c / (1 + (K-1)(1-c))
    return L / M - math.log1p(-(K - 1) * math.expm1(L / M))


def run_gaussian_trajectory(plan):
    """Distortions and per-description rates for every round of ``plan``."""
    K, M, var = plan.K, plan.M, plan.var
    m = np.arange(1, M + 1)
    if isinstance(plan.schedule, DbUniform):
        D = var * (plan.schedule.D_final / var) ** (m / M)
        D[-1] = plan.schedule.D_final
        D_prev = np.concatenate(([var], D[:-1]))
        d = K * D * D_prev / (D_prev + (K - 1) * D)
        meta = {"schedule": "db-uniform", "D_final": plan.schedule.D_final}
    else:
        L = math.log(plan.schedule.d / var)
        D = var * np.exp(m * _log_step_ratio(L, M, K))
        D_prev = np.concatenate(([var], D[:-1]))
        d = D_prev * math.exp(L / M)
        meta = {"schedule": "equal-rate", "d": plan.schedule.d}
    if np.any(d <= 0) or np.any(d > D_prev * (1 + 1e-12)):
        raise ParameterError("infeasible schedule: single-description distortion outside (0, D_prev]")
    rate = 0.5 * np.log2(D_prev / d)
    if isinstance(plan.schedule, EqualRate):
        rate[:] = math.log2(var / plan.schedule.d) / (2 * M)
    return TrajectoryRecord(K=K, d=d, D=D, rate=rate, initial=var, label=meta["schedule"], meta=meta)


def gaussian_equal_rate_final(var, d, K, M):
    """Closed-form ``D^(M)`` of the equal-rate schedule."""
    L = math.log(d / var)
    return var * math.exp(M * _log_step_ratio(L, M, K))


def gaussian_asymptotic_gap(var, d, K, M):
    """``R(D^(M)) - total sum-rate`` in bits for the equal-rate schedule (never positive)."""
    if not 0 < d <= var:
        raise ParameterError(f"d must lie in (0, var], got {d}")
    L = math.log(d / var)
    # 0.5 log2(var/D^(M)) - (K/2) log2(var/d), simplified to avoid cancellation
    return ((K - 1) * L + M * math.log1p(-(K - 1) * math.expm1(L / M))) / (2 * LN2)


def run_exponential_trajectory(lam1, K, M, R_total):
    """Select-max rounds on a one-sided exponential source at ``R_total / (K M)`` bits per description."""
    if not lam1 > 0 or not R_total > 0:
        raise ParameterError(f"lam1 and R_total must be positive, got {lam1}, {R_total}")
    if K < 1 or M < 1:
        raise ParameterError(f"K and M must be >= 1, got K={K}, M={M}")
    R = R_total / (K * M)
    growth = math.log1p(K * math.expm1(R * LN2))
    m = np.arange(1, M + 1)
    log_lam = math.log(lam1) + m * growth  # log of lam_{m+1}
    D = np.exp(-log_lam)
    lam_m = np.exp(log_lam - growth)
    d = 2.0 ** (-R) / lam_m
    return TrajectoryRecord(
        K=K,
        d=d,
        D=D,
        rate=np.full(M, R),
        initial=1.0 / lam1,
        label="exponential",
        meta={"lam1": lam1, "R_total": R_total},
    )


def exponential_rdf_excess(record, lam1):
    """Cumulative sum-rate minus the exponential RDF at each round's distortion."""
    return np.array([s - exp_rdf(lam1, D) for s, D in zip(record.sum_rate, record.D)])


def efficiency_table(var, D_final, cases):
    """Efficiency ``R(D_final) / sum-rate`` for each ``(M, K)`` under the dB-uniform schedule."""
    ref = gaussian_rdf(var, D_final)
    rows = []
    for M, K in cases:
        rec = run_gaussian_trajectory(RoundPlan(K=K, M=M, schedule=DbUniform(D_final), var=var))
        total = rec.total_rate
        rows.append(
            RatePoint(
                total,
                rec.final_distortion,
                K=K,
                round=M,
                label="table1",
                extra={"efficiency": ref / total, "schedule": "db-uniform"},
            )
        )
    return rows
