"""Threshold vector quantizer (TVQ).

Quantizer ``i`` of an ``n``-dimensional TVQ looks at coordinate ``i`` only.
It outputs the zero vector unless that coordinate falls in its cell, in which
case it outputs ``zhat * e_i``. The ``n`` quantizers act on disjoint
coordinates, so any received subset is combined by plain summation.

Two modes are provided:

* analytic: i.i.d. Gaussian coordinates under MSE, closed forms in the
  threshold;
* empirical: any sampled source and difference measure. Centroids come from
  an independent training draw, and the rate is the binary entropy of the
  exceedance frequency pooled over axes.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfcx, ndtr

from ._parallel import map_chunks
from .errors import ParameterError
from .models import MSE, Gaussian, _rng
from .rdf import gaussian_rdf

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
LN2 = math.log(2.0)
#: vectors per Monte-Carlo chunk in the empirical mode
TVQ_CHUNK = 1 << 15


class Side(enum.Enum):
    UPPER = "upper"  # cell x_i > xi
    LOWER = "lower"  # cell x_i < -xi


def split_threshold(xi):
    """Map a signed threshold to ``(|xi|, side)``: positive means ``x > xi``, negative means ``x < xi``."""
    return (abs(xi), Side.LOWER) if xi < 0 else (xi, Side.UPPER)


def alternating(magnitudes):
    """Signed thresholds with odd rounds above ``+xi`` and even rounds below ``-xi``."""
    return [abs(x) if j % 2 == 0 else -abs(x) for j, x in enumerate(magnitudes)]


def binary_entropy(p):
    """Binary entropy in bits with ``0 log 0 = 0``."""
    p = float(p)
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log(p) + (1.0 - p) * math.log1p(-p)) / LN2


# -- analytic Gaussian mode ---------------------------------------------------


def _mills(a):
    """``phi(a) / Q(a)``, stable for large ``a`` through the scaled complementary error function."""
    return SQRT_2_OVER_PI / erfcx(a / math.sqrt(2.0))


def _phi(a):
    return math.exp(-0.5 * a * a) / math.sqrt(2.0 * math.pi)


def tvq_centroid(sigma, xi):
    """Conditional mean of ``N(0, sigma^2)`` above ``xi``: ``sigma phi(a) / Q(a)``, ``a = xi/sigma``."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    return sigma * _mills(xi / sigma)


def tvq_exceedance(sigma, xi):
    """``p_1 = P(X > xi)``."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    return float(ndtr(-xi / sigma))


def tvq_rate(sigma, xi):
    """Entropy (bits) of one quantizer output."""
    return binary_entropy(tvq_exceedance(sigma, xi))


def _distortion_deficit(sigma, xi):
    """``sigma^2 - D_i = sigma^2 phi(a)^2 / Q(a)``."""
    a = xi / sigma
    return sigma * sigma * _phi(a) * _mills(a)


def tvq_axis_distortion(sigma, xi):
    """MSE ``D_i`` on the quantized coordinate."""
    return sigma * sigma - _distortion_deficit(sigma, xi)


@dataclass(frozen=True)
class TvqDistortion:
    total: float
    per_dim: float


def tvq_distortion(sigma, xi, n, received):
    """Total MSE ``|I| D_i + (n - |I|) sigma^2`` after combining ``received`` of ``n`` descriptions."""
    if int(n) != n or n < 1 or not 0 <= received <= n:
        raise ParameterError(f"need 0 <= |I| <= n with n >= 1, got n={n}, |I|={received}")
    total = n * sigma * sigma - received * _distortion_deficit(sigma, xi)
    return TvqDistortion(total=total, per_dim=total / n)


@dataclass(frozen=True)
class TvqSlope:
    xi: float
    slope: float
    limit: float

    @property
    def ratio(self):
        return self.slope / self.limit


def tvq_slope_check(sigma, xi=6.0, rel_step=1e-5):
    """Central-difference ``dR/dD`` of one quantizer at threshold ``xi`` against ``-1/(2 sigma^2 ln 2)``."""
    h = rel_step * max(1.0, abs(xi))
    dR = (tvq_rate(sigma, xi + h) - tvq_rate(sigma, xi - h)) / (2 * h)
    dD = -(_distortion_deficit(sigma, xi + h) - _distortion_deficit(sigma, xi - h)) / (2 * h)
    return TvqSlope(xi=xi, slope=dR / dD, limit=-1.0 / (2.0 * sigma * sigma * LN2))


# -- codebooks, encoding and reconstruction ----------------------------------


@dataclass(frozen=True)
class TvqCodebook:
    """One binary quantizer on ``axis`` (0-based) with cell given by ``xi`` and ``side``."""

    n: int
    xi: float
    axis: int
    centroid: float
    sigma: float = 1.0
    side: Side = Side.UPPER

    def __post_init__(self):
        if not 0 <= self.axis < self.n:
            raise ParameterError(f"axis {self.axis} outside 0..{self.n - 1}")

    @classmethod
    def gaussian(cls, n, xi, axis, sigma=1.0):
        """Analytic-mode codebook with the truncated-normal centroid."""
        return cls(n=n, xi=xi, axis=axis, centroid=tvq_centroid(sigma, xi), sigma=sigma)

    def in_cell(self, values):
        if self.side is Side.UPPER:
            return values > self.xi
        return values < -self.xi


def gaussian_codebooks(n, xi, sigma=1.0):
    """The ``n`` analytic-mode quantizers, one per coordinate."""
    z = tvq_centroid(sigma, xi)
    return [TvqCodebook(n=n, xi=xi, axis=i, centroid=z, sigma=sigma) for i in range(n)]


@dataclass(frozen=True)
class TvqDescriptionSet:
    """``bits[j, l]`` is the output of codebook ``j`` on vector ``l``."""

    bits: np.ndarray
    codebooks: tuple


def _check_axes(codebooks):
    axes = [cb.axis for cb in codebooks]
    if len(set(axes)) != len(axes):
        raise ParameterError(f"codebooks must use distinct axes, got {axes}")
    if len({cb.n for cb in codebooks}) > 1:
        raise ParameterError("codebooks disagree on the dimension n")


def tvq_encode(x, codebooks):
    """One bit per codebook per vector; ``x`` has shape ``(n,)`` or ``(n, L)``."""
    _check_axes(codebooks)
    x = np.asarray(x, dtype=float)
    mat = x[:, None] if x.ndim == 1 else x
    if codebooks and mat.shape[0] != codebooks[0].n:
        raise ParameterError(f"vector dimension {mat.shape[0]} does not match n={codebooks[0].n}")
    bits = np.array([cb.in_cell(mat[cb.axis]) for cb in codebooks], dtype=bool).reshape(len(codebooks), mat.shape[1])
    return TvqDescriptionSet(bits=bits, codebooks=tuple(codebooks))


def tvq_reconstruct(descriptions, received=None):
    """Sum of the received codewords; ``received`` lists codebook positions (default: all)."""
    cbs = descriptions.codebooks
    if not cbs:
        raise ParameterError("empty description set")
    idx = range(len(cbs)) if received is None else received
    out = np.zeros((cbs[0].n, descriptions.bits.shape[1]))
    for j in idx:
        cb = cbs[j]
        out[cb.axis] += descriptions.bits[j] * cb.centroid
    return out


# -- multi-round runs ---------------------------------------------------------


@dataclass
class TvqRun:
    """Per-round results; rates are bits per dimension (K = n descriptions per round).

    ``partial`` holds, per round, the per-dimension distortion after
    combining the first ``k = 0..n`` descriptions of that round.
    """

    n: int
    thresholds: list
    rate: np.ndarray
    D: np.ndarray
    D0: float
    centroids: list
    exceedance: np.ndarray
    partial: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def M(self):
        return len(self.D)

    @property
    def cumulative_rate(self):
        return np.cumsum(self.rate)

    def partial_curves(self):
        """``(rate, distortion)`` pairs for every description count of every round."""
        rows = []
        prev = 0.0
        for j, curve in enumerate(self.partial):
            for k, dist in enumerate(curve):
                rows.append((j + 1, k, prev + self.rate[j] * k / self.n, float(dist)))
            prev += self.rate[j]
        return rows


def tvq_gaussian_multiround(var, thresholds, n):
    """Analytic multi-round TVQ on ``N(0, var)`` coordinates with absolute thresholds.

    The residual after a round is treated as Gaussian with per-dimension
    variance ``D_i`` of that round.
    """
    if not thresholds:
        raise ParameterError("need at least one round")
    s2 = var
    rates, dists, cents, probs, partial = [], [], [], [], []
    for xi in thresholds:
        sigma = math.sqrt(s2)
        p1 = tvq_exceedance(sigma, xi)
        rates.append(binary_entropy(p1))
        probs.append(p1)
        cents.append(tvq_centroid(sigma, xi))
        partial.append(np.array([tvq_distortion(sigma, xi, n, k).per_dim for k in range(n + 1)]))
        s2 = tvq_axis_distortion(sigma, xi)
        dists.append(s2)
    return TvqRun(
        n=n,
        thresholds=list(thresholds),
        rate=np.array(rates),
        D=np.array(dists),
        D0=var,
        centroids=cents,
        exceedance=np.array(probs),
        partial=partial,
        meta={"mode": "analytic", "residual_model": "gaussian"},
    )


def tvq_efficiency(run, var=1.0):
    """Mean over rounds of ``R(D_m) / cumulative rate`` (Gaussian RDF, all descriptions received)."""
    cum = run.cumulative_rate
    return float(np.mean([gaussian_rdf(var, D) / r for D, r in zip(run.D, cum)]))


def _apply_round(res, xi, side, centroid):
    """Quantize every axis of ``res`` in place; returns per-axis exceedance counts."""
    mask = res > xi if side is Side.UPPER else res < -xi
    res -= mask * centroid
    return mask.sum(axis=1)


def _source_chunk(source, n, size, rng):
    return source.sample(n * size, rng).reshape(n, size)


def _chunk_matrices(data, chunk):
    L = data.shape[1]
    return [data[:, s : s + chunk] for s in range(0, L, chunk)]


def _train_centroids(source, thresholds, n, L, seed, chunk, train=None):
    """Conditional-mean centroid per round from a training draw, round by round."""
    cents = []
    for j, xi in enumerate(thresholds):
        mag, side = split_threshold(xi)

        def work(index, size, rng, j=j, mag=mag, side=side, mats=None):
            res = _source_chunk(source, n, size, rng) if mats is None else mats[index].copy()
            for (m_prev, s_prev), c in zip(map(split_threshold, thresholds[:j]), cents):
                _apply_round(res, m_prev, s_prev, c)
            cell = res > mag if side is Side.UPPER else res < -mag
            return float(res[cell].sum()), int(cell.sum())

        if train is None:
            parts = map_chunks(work, seed, L, chunk)
        else:
            mats = _chunk_matrices(train, chunk)
            parts = [work(i, m.shape[1], None, mats=mats) for i, m in enumerate(mats)]
        total = sum(p[0] for p in parts)
        count = sum(p[1] for p in parts)
        if count == 0:
            # empty cell: the codeword is never used, any value gives the same output
            cents.append(mag if side is Side.UPPER else -mag)
        else:
            cents.append(total / count)
    return cents


def tvq_multiround(
    source,
    thresholds,
    n,
    L=None,
    measure=MSE(),
    seed=0,
    centroids=None,
    train=None,
    chunk=TVQ_CHUNK,
):
    """Empirical multi-round TVQ with ``K = n`` descriptions per round.

    ``source`` is a source model (sampled in seeded chunks, ``L`` vectors)
    or a ``(n, L)`` sample matrix. ``thresholds`` are signed: positive
    ``xi`` selects ``x > xi``, negative selects ``x < xi``. Without explicit
    ``centroids`` they are trained on an independent draw with a derived
    seed, or on ``train`` for matrix input (on the data itself when neither
    is given, recorded in ``meta``).
    """
    if not thresholds:
        raise ParameterError("need at least one round")
    matrix = None
    if isinstance(source, np.ndarray):
        matrix = np.asarray(source, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != n or matrix.shape[1] == 0:
            raise ParameterError(f"sample matrix must have shape (n={n}, L>0), got {matrix.shape}")
        L = matrix.shape[1]
    elif L is None or L < 1:
        raise ParameterError("L must be a positive vector count")
    train_seed, test_seed = np.random.SeedSequence(seed).spawn(2)
    meta = {"mode": "empirical", "chunk_vectors": chunk, "centroids": "given"}
    if centroids is None:
        if matrix is None:
            centroids = _train_centroids(source, thresholds, n, L, train_seed, chunk)
            meta["centroids"] = "independent training draw"
        else:
            centroids = _train_centroids(None, thresholds, n, L, None, chunk, train=matrix if train is None else train)
            meta["centroids"] = "in-sample" if train is None else "training matrix"
    if len(centroids) != len(thresholds):
        raise ParameterError("need one centroid per round")
    M = len(thresholds)

    def work(index, size, rng, mats=None):
        res = _source_chunk(source, n, size, rng) if mats is None else mats[index].copy()
        before = np.empty((M + 1, n))
        counts = np.empty((M, n), dtype=np.int64)
        before[0] = measure.pointwise(res, 0.0).sum(axis=1)
        for j, (xi, c) in enumerate(zip(thresholds, centroids)):
            mag, side = split_threshold(xi)
            counts[j] = _apply_round(res, mag, side, c)
            before[j + 1] = measure.pointwise(res, 0.0).sum(axis=1)
        return before, counts

    if matrix is None:
        parts = map_chunks(work, test_seed, L, chunk)
    else:
        mats = _chunk_matrices(matrix, chunk)
        parts = [work(i, m.shape[1], None, mats=mats) for i, m in enumerate(mats)]
    axis_sums = np.zeros((M + 1, n))
    counts = np.zeros((M, n), dtype=np.int64)
    for s, c in parts:
        axis_sums += s
        counts += c
    axis_means = axis_sums / L  # per-axis mean distortion before round 1 and after each round
    p = counts / L
    pp = p.mean(axis=1)
    rates = np.array([binary_entropy(v) for v in pp])
    partial = []
    for j in range(M):
        prev, new = axis_means[j], axis_means[j + 1]
        partial.append(np.array([(new[:k].sum() + prev[k:].sum()) / n for k in range(n + 1)]))
    D = axis_means[1:].mean(axis=1)
    return TvqRun(
        n=n,
        thresholds=list(thresholds),
        rate=rates,
        D=D,
        D0=float(axis_means[0].mean()),
        centroids=list(centroids),
        exceedance=pp,
        partial=partial,
        meta=meta,
    )


def laplacian_slb(D, variance=1.0):
    """Absolute-error RDF of a Laplacian (tight SLB): ``max(0, log2(b / D))`` with ``b = sqrt(variance/2)``."""
    b = math.sqrt(variance / 2.0)
    return max(0.0, math.log2(b / D))


def accumulated_rate_loss(run, slb=laplacian_slb):
    """``sum of rates - SLB(D^(m))`` after each round."""
    return np.array([r - slb(D) for r, D in zip(run.cumulative_rate, run.D)])


def rate_loss_curve(run, slb=laplacian_slb):
    """Accumulated rate-loss along all partial description counts, as ``(distortion, loss)`` arrays."""
    pts = run.partial_curves()
    D = np.array([p[3] for p in pts])
    R = np.array([p[2] for p in pts])
    return D, R - np.array([slb(d) for d in D])


def gaussian_sample_matrix(n, L, seed, var=1.0):
    """Convenience ``(n, L)`` i.i.d. Gaussian matrix."""
    return Gaussian(var).sample(n * L, _rng(seed)).reshape(n, L)
