"""Online inference from arrival times: which CDF, and how many to come.

The distribution is picked by integrated squared distance between each
basket CDF and the empirical CDF of the arrivals seen so far; the count
N gets a posterior from the binomial arrival-count likelihood
C(N, k) s^k (1 - s)^(N-k) at elapsed CDF-time s, under the uniform prior
on {1..M}.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .basket import DistributionBasket

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def integrated_squared_distance(
    arrivals: np.ndarray, entry_cdf, a: float, upto: float
) -> float:
    """int_a^upto (G(u) - F_emp(u))^2 du on the empirical step partition.

    The empirical CDF is constant on each piece, so per-piece Gauss
    nodes integrate the smooth G exactly for practical purposes; all
    pieces evaluate in one vectorised call.
    """
    t = np.sort(np.asarray(arrivals, dtype=np.float64))
    j = len(t)
    pieces = np.concatenate(([a], t[t < upto], [upto]))
    lo = pieces[:-1]
    hi = pieces[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    u = mid[:, None] + half[:, None] * _GL_X[None, :]
    femp = np.minimum(np.arange(len(lo)), j) / j
    diff = entry_cdf(u) - femp[:, None]
    return float(np.sum(half * (diff * diff @ _GL_W)))


def fit_distribution(
    arrivals, basket: DistributionBasket, upto: float | None = None
) -> int:
    """Index of the basket entry closest to the empirical arrival CDF.

    Distance is integrated over [a, T] with T the latest arrival unless
    given; ties break to the lowest index.
    """
    t = np.sort(np.asarray(arrivals, dtype=np.float64))
    if t.size == 0:
        raise ValueError("fit is undefined with no arrivals")
    horizon = float(t[-1]) if upto is None else float(upto)
    dists = [
        integrated_squared_distance(t, e.cdf, basket.a, horizon)
        for e in basket.entries
    ]
    return int(np.argmin(dists))


def count_posterior(k: int, s: float, m_max: int) -> np.ndarray:
    """Posterior weights over N in {1..M} given k arrivals by CDF-time s.

    Index i of the returned array is the weight of N = i + 1.
    """
    if not 0 < k <= m_max:
        raise ValueError("need 1 <= k <= M")
    s = min(max(s, 1e-12), 1.0 - 1e-12)
    n = np.arange(1, m_max + 1, dtype=np.float64)
    logw = np.full(m_max, -np.inf)
    ok = n >= k
    nn = n[ok]
    logw[ok] = (
        gammaln(nn + 1.0)
        - gammaln(k + 1.0)
        - gammaln(nn - k + 1.0)
        + k * np.log(s)
        + (nn - k) * np.log1p(-s)
    )
    w = np.exp(logw - logw.max())
    return w / w.sum()


def posterior_median_count(k: int, s: float, m_max: int) -> int:
    w = count_posterior(k, s, m_max)
    cum = np.cumsum(w)
    return int(np.searchsorted(cum, 0.5) + 1)


def joint_belief(
    arrivals, basket: DistributionBasket, m_max: int, upto: float | None = None
) -> np.ndarray:
    """Posterior over (basket entry, N) from the count likelihood.

    Shape (len(basket), M); rows share the same arrival count but see
    different elapsed CDF-times s = G(T).
    """
    t = np.sort(np.asarray(arrivals, dtype=np.float64))
    k = len(t)
    if k == 0:
        w = np.full((len(basket), m_max), 1.0)
        return w / w.sum()
    horizon = float(t[-1]) if upto is None else float(upto)
    out = np.empty((len(basket), m_max))
    for i, e in enumerate(basket.entries):
        s = float(e.cdf(horizon))
        out[i] = count_posterior(k, s, m_max) if k <= m_max else 0.0
    total = out.sum()
    if total <= 0:
        raise ValueError("belief degenerated to zero mass")
    return out / total
