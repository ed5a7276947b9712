"""Edge probabilities of the spherical random geometric graph.

The inner product of two independent uniform points on the sphere
``S^{d-1}`` has density

    f_d(x) = Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)) * (1 - x^2)_+^((d-3)/2)

and the edge threshold ``t`` of ``G(n, p, d)`` is the upper ``p``-quantile of
that law.  Everything here works in log space so that ``d`` can reach
``1e8``: for moderate ``d`` the tail integral is an incomplete beta function
evaluated by a continued fraction whose prefactor uses Stirling differences
instead of subtracting two huge log-Gamma values.  For very large ``d`` the
tail is integrated in the scaled variable ``(x - t) * d``, which avoids the
rounding of ``1 - t^2`` that a beta-function route would amplify by ``d``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .exceptions import DomainError

LOG_2PI = math.log(2.0 * math.pi)
LOG_SQRT_PI = 0.5 * math.log(math.pi)

# B_{2k} / (2k (2k - 1)) for the Stirling series of log Gamma
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
_STIRLING_MIN_Z = 10.0

_CF_EPS = 1e-15
_CF_TINY = 1e-300
_CF_MAX_ITER = 200_000
# above this the continued fraction inherits d * eps error from forming 1 - t^2
_CF_MAX_DIM = 2000


def stirling_tail(z):
    """Return ``log Gamma(z) - [(z - 1/2) log z - z + log(2 pi)/2]``.

    Accurate to rounding for every ``z > 0``; the asymptotic series is used
    for ``z >= 10`` where the direct difference would cancel.
    """
    z = float(z)
    if z <= 0:
        raise DomainError(f"stirling_tail needs z > 0, got {z}")
    if z < _STIRLING_MIN_Z:
        return special.gammaln(z) - ((z - 0.5) * math.log(z) - z + 0.5 * LOG_2PI)
    inv = 1.0 / z
    inv2 = inv * inv
    total = 0.0
    power = inv
    for c in _STIRLING:
        total += c * power
        power *= inv2
    return total


def log_gamma_ratio(z, h):
    """``log Gamma(z + h) - log Gamma(z)`` without catastrophic cancellation."""
    z = float(z)
    h = float(h)
    if z < _STIRLING_MIN_Z or z + h < _STIRLING_MIN_Z:
        return special.gammaln(z + h) - special.gammaln(z)
    return (
        (z + h - 0.5) * math.log1p(h / z)
        + h * math.log(z)
        - h
        + stirling_tail(z + h)
        - stirling_tail(z)
    )


def _check_dim(d, minimum=3):
    if d < minimum or int(d) != d:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {d}")


def log_surface_constant(d):
    """Log of the normalising constant of ``f_d``."""
    _check_dim(d)
    return log_gamma_ratio((d - 1) / 2.0, 0.5) - LOG_SQRT_PI


def surface_density(x, d):
    """Density of one coordinate of a uniform point on ``S^{d-1}``.

    Parameters
    ----------
    x : float or array_like
        Evaluation points.
    d : int
        Ambient dimension, at least 3.

    Returns
    -------
    float or ndarray
        ``f_d(x)``, zero outside ``[-1, 1]``.
    """
    _check_dim(d)
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 1.0
    xs = np.where(inside, x, 0.0)
    logf = log_surface_constant(d) + special.xlog1py((d - 3) / 2.0, -xs * xs)
    out = np.where(inside, np.exp(logf), 0.0)
    return out[()] if out.ndim == 0 else out


def _beta_cf(x, a, b):
    """Continued fraction of the regularised incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    dd = 1.0 - qab * x / qap
    if abs(dd) < _CF_TINY:
        dd = _CF_TINY
    dd = 1.0 / dd
    h = dd
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        dd = 1.0 + aa * dd
        if abs(dd) < _CF_TINY:
            dd = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        dd = 1.0 / dd
        h *= dd * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        dd = 1.0 + aa * dd
        if abs(dd) < _CF_TINY:
            dd = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        dd = 1.0 / dd
        delta = dd * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    return None


def _upper_tail_quad(s, d):
    """``Pr[X_1 >= s]`` by quadrature of ``f_d`` relative to its value at ``s``.

    The integrand is written in terms of the offset ``u = x - s`` so that
    ``1 - s^2`` is never formed in floating point; for large ``d`` that
    rounding alone costs ``d * 1e-17`` in relative accuracy.
    """
    k = (d - 3) / 2.0
    log_head = log_surface_constant(d) + k * math.log1p(-s * s)
    one_minus_s2 = (1.0 - s) * (1.0 + s)

    def integrand(u):
        return math.exp(k * math.log1p(-(2.0 * s * u + u * u) / one_minus_s2))

    scale = 1.0 / max(2.0 * k * s, math.sqrt(max(2.0 * k, 1.0)))
    upper = min(1.0 - s, 80.0 * scale)
    breaks = [b * scale for b in (1.0, 4.0, 16.0) if b * scale < upper]
    total = 0.0
    lo = 0.0
    for hi in breaks + [upper]:
        val, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=2e-14, limit=200)
        total += val
        lo = hi
    return math.exp(log_head) * total


def _central_mass(s, d):
    """``Pr[0 <= X_1 <= s]``; keeps the tail monotone when it is close to 1/2."""
    k = (d - 3) / 2.0
    c = log_surface_constant(d)
    val, _ = integrate.quad(lambda x: math.exp(c + k * math.log1p(-x * x)), 0.0, s,
                            epsabs=0.0, epsrel=2e-14)
    return val


def _upper_tail(s, d):
    """``Pr[X_1 >= s]`` for ``0 < s < 1``."""
    b = (d - 1) / 2.0
    x = s * s
    if d > _CF_MAX_DIM:
        if s * math.sqrt(d) < 1.0:
            return 0.5 - _central_mass(s, d)
        return _upper_tail_quad(s, d)
    log_beta = LOG_SQRT_PI - log_gamma_ratio(b, 0.5)  # log B(1/2, b)
    if 1.0 - x < (b + 1.0) / (b + 2.5):
        # tail = I_{1-x}(b, 1/2) / 2
        cf = _beta_cf(1.0 - x, b, 0.5)
        if cf is None:
            return _upper_tail_quad(s, d)
        logfront = b * math.log1p(-x) + 0.5 * math.log(x) - math.log(b) - log_beta
        return 0.5 * math.exp(logfront) * cf
    # tail = (1 - I_x(1/2, b)) / 2
    cf = _beta_cf(x, 0.5, b)
    if cf is None:
        return _upper_tail_quad(s, d)
    logfront = 0.5 * math.log(x) + b * math.log1p(-x) - math.log(0.5) - log_beta
    return 0.5 * (1.0 - math.exp(logfront) * cf)


def _edge_prob_scalar(t, d):
    if t <= -1.0:
        return 1.0
    if t >= 1.0:
        return 0.0
    if t == 0.0:
        return 0.5
    if abs(t) < 1e-100:
        # t^2 would underflow; the cubic correction is far below rounding
        return 0.5 - t * math.exp(log_surface_constant(d))
    if d == 3:
        return (1.0 - t) / 2.0
    tail = _upper_tail(abs(t), d)
    return tail if t > 0 else 1.0 - tail


def edge_prob_exact(t, d):
    """Probability ``Pr[<X, Y> >= t]`` for independent uniform sphere points.

    Parameters
    ----------
    t : float or array_like
        Inner-product threshold.
    d : int
        Ambient dimension, at least 3.
    """
    _check_dim(d)
    if np.ndim(t) == 0:
        return _edge_prob_scalar(float(t), d)
    t = np.asarray(t, dtype=float)
    return np.array([_edge_prob_scalar(v, d) for v in t.ravel()]).reshape(t.shape)


def threshold(p, d, *, bisect_width=1e-6, tol=1e-13):
    """Threshold ``t_{p,d}`` with ``edge_prob_exact(t, d) == p``.

    Bisection on ``[-1, 1]`` down to ``bisect_width``, then safeguarded
    Newton steps with derivative ``-f_d(t)``.
    """
    _check_dim(d)
    if not 0.0 < p < 1.0:
        raise DomainError(f"edge probability must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    if d == 3:
        return 1.0 - 2.0 * p
    lo, hi = -1.0, 1.0
    while hi - lo > bisect_width:
        mid = 0.5 * (lo + hi)
        if _edge_prob_scalar(mid, d) > p:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    # t is resolved relative to its natural scale 1/sqrt(d) when near zero
    scale = min(1.0, 1.0 / math.sqrt(d))
    for _ in range(200):
        g = _edge_prob_scalar(t, d) - p
        if g == 0.0:
            break
        if g > 0:
            lo = t
        else:
            hi = t
        slope = float(surface_density(t, d))
        if slope <= 0.0:
            break
        t_new = t + g / slope
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        done = abs(t_new - t) < tol * min(1.0, max(abs(t_new), scale))
        t = t_new
        if done or t in (lo, hi):
            break
    return t


def log_gaussian_edge_prob(t, d):
    """``log(1 - Phi(sqrt(d) t))``, finite far into the tail."""
    z = np.sqrt(d) * np.asarray(t, dtype=float)
    out = special.log_ndtr(-z)
    return out[()] if np.ndim(out) == 0 else out


def gaussian_edge_prob(t, d):
    """Gaussian surrogate edge probability ``p0 = 1 - Phi(sqrt(d) t)``."""
    t = np.asarray(t, dtype=float)
    arg = np.sqrt(d) * np.abs(t) / math.sqrt(2.0)
    upper = 0.5 * special.erfc(arg)
    out = np.where(t >= 0, upper, 1.0 - upper)
    return out[()] if out.ndim == 0 else out


def normal_quantile(q):
    """Standard normal quantile function ``Phi^{-1}(q)``."""
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0.0) | (q >= 1.0)):
        raise DomainError("normal_quantile needs q strictly inside (0, 1)")
    out = special.ndtri(q)
    return out[()] if out.ndim == 0 else out


def pp0_prediction(t, d):
    """Leading-order prediction ``1 - d t^4 / 4`` for the ratio ``p / p0``."""
    return 1.0 - d * np.asarray(t, dtype=float) ** 4 / 4.0


def pp0_ratio(p, d):
    """Observed and predicted deviation of ``p / p0`` from one.

    Returns ``(t, p0, predicted, actual)`` where ``predicted = 1 - d t^4/4``
    and ``actual = p_exact(t) / p0(t)`` evaluated at ``t = t_{p,d}``.
    """
    t = threshold(p, d)
    p_exact = edge_prob_exact(t, d)
    p0 = float(gaussian_edge_prob(t, d))
    return t, p0, float(pp0_prediction(t, d)), p_exact / p0


@dataclass(frozen=True)
class ModelParams:
    """Parameters ``(n, d, p)`` of ``G(n, p, d)`` with the derived threshold.

    Build with :meth:`from_p` or :meth:`from_t`; ``p0`` is always the
    Gaussian surrogate probability at ``t``.
    """

    n: int
    d: int
    p: float
    t: float
    p0: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        _check_dim(self.d)
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must lie in (0, 1), got {self.p}")
        if not -1.0 < self.t < 1.0:
            raise DomainError(f"t must lie in (-1, 1), got {self.t}")

    @classmethod
    def from_p(cls, n, d, p):
        t = threshold(p, d)
        return cls(n=int(n), d=int(d), p=float(p), t=t, p0=float(gaussian_edge_prob(t, d)))

    @classmethod
    def from_t(cls, n, d, t):
        p = edge_prob_exact(t, d)
        return cls(n=int(n), d=int(d), p=p, t=float(t), p0=float(gaussian_edge_prob(t, d)))

    @property
    def log_p0(self):
        return float(log_gaussian_edge_prob(self.t, self.d))

    @property
    def dt2(self):
        """The contour scale ``d t^2``."""
        return self.d * self.t * self.t
