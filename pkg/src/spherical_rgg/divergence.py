"""Inclusion divergence between two Erdos-Renyi laws.

For ``X ~ G(n, p)`` and ``Y ~ G(n, q)`` the labeled inclusion probabilities
of a graph with ``g`` edges are ``p^g`` and ``q^g``.  The relative error
``|(p/q)^g - 1|`` is monotone in ``g``, so the best class of graphs is an
edge-count cutoff and the divergence reduces to a one-dimensional scan

    I-Div = min_{0 <= g <= m} |(p/q)^g - 1| + Pr[Binom(m, q) > g],

with ``m = n (n - 1) / 2``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .exceptions import DomainError

MAX_PAIRS = 10**8
_CHUNK = 1 << 20


@dataclass(frozen=True)
class IdivResult:
    """Minimum of the edge-count scan and where it is attained."""

    value: float
    argmin_g: int
    ratio_term: float
    tail_term: float


def binom_tail(m, q, g):
    """Return ``Pr[Binom(m, q) > g]``.

    Evaluated as a regularized incomplete beta function (the Boost
    implementation behind ``scipy.stats.binom.sf``), which keeps relative
    accuracy near 1e-12 deep in the tail.
    """
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    g = np.asarray(g)
    out = stats.binom.sf(np.clip(g, 0, m), m, q)
    out = np.where(g < 0, 1.0, np.where(g >= m, 0.0, out))
    return float(out) if out.ndim == 0 else out


def _ratio_term(g, log_ratio):
    if log_ratio == -math.inf:
        return np.where(g == 0, 0.0, 1.0)
    with np.errstate(over="ignore"):
        return np.abs(np.expm1(g * log_ratio))


def idiv_er(n, p, q):
    """Inclusion divergence of ``G(n, p)`` relative to ``G(n, q)``.

    Parameters
    ----------
    n : int
        Number of vertices, at least 2.
    p, q : float
        Edge probabilities.

    Returns
    -------
    IdivResult
        The smallest ``g`` attaining the minimum is reported.
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise DomainError(f"probabilities must lie in [0, 1], got p={p}, q={q}")
    if q == 0.0:
        if p > 0.0:
            raise DomainError("q = 0 with p > 0 makes the inclusion ratio undefined")
        return IdivResult(0.0, 0, 0.0, 0.0)
    m = n * (n - 1) // 2
    if m > MAX_PAIRS:
        raise DomainError(f"C(n, 2) = {m} exceeds the scan limit {MAX_PAIRS}")
    log_ratio = (math.log(p) if p > 0 else -math.inf) - math.log(q)

    best = (math.inf, 0, 0.0, 0.0)
    for start in range(0, m + 1, _CHUNK):
        g = np.arange(start, min(start + _CHUNK, m + 1))
        ratio = _ratio_term(g, log_ratio)
        tail = binom_tail(m, q, g)
        total = ratio + tail
        i = int(np.argmin(total))
        if total[i] < best[0]:
            best = (float(total[i]), int(g[i]), float(ratio[i]), float(tail[i]))
    value, g_best, ratio_best, tail_best = best
    return IdivResult(value, g_best, ratio_best, tail_best)
