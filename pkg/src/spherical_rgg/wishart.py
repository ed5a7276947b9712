"""Characteristic functions of Wishart and spherical Wishart matrices.

Matrices are plain ``(n, n)`` numpy arrays, complex symmetric.  The pairing
used to define characteristic functions is

    <M, N> = tr(M N + diag M diag N) / 2,

so a hollow ``Theta`` with ``theta`` at ``(j, k)`` and ``(k, j)`` pairs with
``V`` to ``theta V_jk``.

The spherical Wishart characteristic function is estimated through a
steepest-descent representation: with ``u_j`` iid from the density

    eta_d(u) = Gamma(d/2 + 1) / (2 pi (d/2)^(d/2)) (exp(u cot u) sinc u)^(d/2)

on ``(-pi, pi)`` and ``beta(u) = u cot u + i u``,

    phi_V(Theta) = E[ prod_j beta'(u_j)/i * det(I - (i/d) Theta beta(U)^-1)^(-d/2) ].

Scaling the contour by ``lam >= 1`` (``Z = lam beta(U)``) extends this to
``||Theta||_op < lam d`` at the price of an extra weight.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .estimate import MIN_BATCHES, as_generator, run_batches
from .exceptions import DiagnosticError, DomainError
from .graphs import sample_gram
from .specialfns import LOG_2PI, stirling_tail

_SERIES_CUT = 1e-4
_EVAL_CHUNK = 1 << 14


# -- matrix helpers -----------------------------------------------------------

def as_sym_matrix(theta):
    """Validate and return ``theta`` as a complex symmetric array."""
    a = np.atleast_2d(np.asarray(theta, dtype=complex))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-14 * max(1.0, np.abs(a).max(initial=0))):
        raise DomainError("matrix is not symmetric")
    return a


def hollow_matrix(n, edges, values):
    """Hollow symmetric matrix with ``values[e]`` at both ends of ``edges[e]``."""
    a = np.zeros((n, n), dtype=complex)
    for (j, k), v in zip(edges, np.broadcast_to(values, (len(edges),))):
        a[j, k] = a[k, j] = v
    return a


def is_hollow(theta, atol=0.0):
    return bool(np.all(np.abs(np.diagonal(theta)) <= atol))


def op_norm(theta):
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(theta), 2))


def frobenius_norm(theta):
    return float(np.linalg.norm(np.asarray(theta), "fro"))


def pairing(m, n):
    """Return ``tr(M N + diag M diag N) / 2``."""
    m = np.asarray(m)
    n = np.asarray(n)
    if m.shape != n.shape:
        raise DomainError(f"dimension mismatch: {m.shape} vs {n.shape}")
    return 0.5 * (np.sum(m * n.T) + np.sum(np.diagonal(m) * np.diagonal(n)))


# -- Wishart ------------------------------------------------------------------

def wishart_cf(theta, d):
    """Characteristic function ``det(I - i (Theta + diag Theta))^(-d/2)``.

    Valid when ``I + Im Theta + diag Im Theta`` is positive definite.  With
    ``B = B1 + i B2`` and the Cholesky factor ``L L^T = I + B2``, the matrix
    ``I - i B`` equals ``L (I - i C) L^T`` for the real symmetric
    ``C = L^-1 B1 L^-T``, which fixes the branch of the logarithm:
    ``log det = 2 sum log L_jj + sum log(1 - i c_j)``.
    """
    theta = as_sym_matrix(theta)
    b = theta + np.diag(np.diagonal(theta))
    b1, b2 = b.real, b.imag
    try:
        chol = np.linalg.cholesky(np.eye(len(b)) + b2)
    except np.linalg.LinAlgError:
        raise DomainError("I + Im(Theta + diag Theta) is not positive definite") from None
    half = np.linalg.solve(chol, b1)
    c = np.linalg.eigvalsh(np.linalg.solve(chol, half.T))
    logdet = 2.0 * np.sum(np.log(np.diagonal(chol))) + np.sum(np.log(1.0 - 1j * c))
    return complex(np.exp(-0.5 * d * logdet))


def gaussian_cf(theta, d):
    """Characteristic function of the hollow matrix with iid ``N(0, 1/d)`` entries.

    Equals ``exp(-tr(Theta^2) / (4 d))``; for a single pair ``theta e_jk``
    this is ``exp(-theta^2 / (2 d))``.
    """
    theta = np.asarray(theta)
    return complex(np.exp(-np.trace(theta @ theta) / (4.0 * d)))


# -- the density eta_d ------------------------------------------------------------

def _g_minus_one(u):
    """``u cot u + log sinc u - 1`` for ``|u| < pi``, accurate near zero."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < _SERIES_CUT
    us = u[small] ** 2
    out[small] = -us / 2.0 - us**2 / 36.0 - us**3 / 405.0
    ub = u[~small]
    with np.errstate(divide="ignore"):
        out[~small] = ub / np.tan(ub) - 1.0 + np.log(np.sin(ub) / ub)
    return out


def _log_eta_const(d):
    k = 0.5 * d
    return 0.5 * (math.log(k) - LOG_2PI) + stirling_tail(k)


def log_eta_density(u, d):
    """Logarithm of ``eta_d``; ``-inf`` outside ``(-pi, pi)``."""
    if d < 3:
        raise DomainError(f"eta_d needs d >= 3, got {d}")
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < np.pi
    out = np.full(u.shape, -np.inf)
    out[inside] = 0.5 * d * _g_minus_one(u[inside]) + _log_eta_const(d)
    return out if out.ndim else float(out)


def eta_density(u, d):
    """The density ``eta_d`` on ``(-pi, pi)``."""
    return np.exp(log_eta_density(u, d))


def _log_eta_envelope(u, d):
    # u cot u + log sinc u <= 1 - u^2/2 and the Stirling remainder is below 1/(6d)
    return 0.5 * math.log(d / (4.0 * math.pi)) - 0.25 * d * np.asarray(u) ** 2 + 1.0 / (3.0 * d)


@lru_cache(maxsize=256)
def _check_eta_envelope(d):
    grid = np.linspace(-np.pi, np.pi, 100_001)[1:-1]
    gap = log_eta_density(grid, d) - _log_eta_envelope(grid, d)
    if np.max(gap) > 1e-12:
        raise DiagnosticError(
            f"eta_{d} exceeds its Gaussian envelope", {"d": d, "max_log_gap": float(np.max(gap))}
        )
    return True


def sample_eta(d, rng, size=None):
    """Draw from ``eta_d`` by rejection from ``N(0, 2/d)``.

    The envelope ``sqrt(d / (4 pi)) exp(-d u^2 / 4 + 1/(3d))`` dominates
    ``eta_d``; this is re-verified on a fine grid the first time each ``d``
    is used.
    """
    if d < 3:
        raise DomainError(f"eta_d needs d >= 3, got {d}")
    _check_eta_envelope(int(d) if float(d).is_integer() else float(d))
    gen = as_generator(rng)
    want = 1 if size is None else int(np.prod(size))
    sd = math.sqrt(2.0 / d)
    out = np.empty(want)
    filled = 0
    while filled < want:
        m = max(16, int(1.1 * (want - filled)) + 8)
        u = sd * gen.standard_normal(m)
        v = gen.random(m)
        ok = np.abs(u) < np.pi
        u, v = u[ok], v[ok]
        keep = np.log(v) < log_eta_density(u, d) - _log_eta_envelope(u, d)
        take = u[keep][: want - filled]
        out[filled:filled + take.size] = take
        filled += take.size
    return float(out[0]) if size is None else out.reshape(size)


# -- the contour beta ---------------------------------------------------------------

def _check_u(u):
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) >= np.pi):
        raise DomainError("beta is defined only for |u| < pi")
    return u


def _ucotu(u):
    out = np.empty_like(u)
    small = np.abs(u) < _SERIES_CUT
    us = u[small] ** 2
    out[small] = 1.0 - us / 3.0 - us**2 / 45.0 - 2.0 * us**3 / 945.0
    ub = u[~small]
    out[~small] = ub / np.tan(ub)
    return out


def _re_beta_prime(u):
    # derivative of u cot u
    out = np.empty_like(u)
    small = np.abs(u) < _SERIES_CUT
    us = u[small]
    out[small] = -2.0 * us / 3.0 - 4.0 * us**3 / 45.0 - 12.0 * us**5 / 945.0
    ub = u[~small]
    s = np.sin(ub)
    out[~small] = np.cos(ub) / s - ub / (s * s)
    return out


def beta_point(u):
    """``beta(u) = u cot u + i u = e^{iu} / sinc u``."""
    u = _check_u(u)
    flat = np.atleast_1d(u)
    out = _ucotu(flat) + 1j * flat
    return out.reshape(u.shape) if u.ndim else complex(out[0])


def beta_prime(u):
    """``beta'(u) = cot u - u csc^2 u + i``."""
    u = _check_u(u)
    flat = np.atleast_1d(u)
    out = _re_beta_prime(flat) + 1j
    return out.reshape(u.shape) if u.ndim else complex(out[0])


# -- spherical Wishart --------------------------------------------------------------

def _log_det_one_minus(a, n):
    """Principal-branch ``log det(I - A)`` for stacked hollow ``A`` with ``rho(A) < 1``."""
    if n == 1:
        return np.zeros(a.shape[:-2], dtype=complex)
    if n == 2:
        # eigenvalues +-s with |s| < 1, so log(1 - s^2) = log(1 - s) + log(1 + s)
        return np.log1p(-(a[..., 0, 1] * a[..., 1, 0]))
    return _eig_logdet(a)


def _eig_logdet(a):
    lam = 1.0 - np.linalg.eigvals(a)
    if np.any(lam.real <= 0):
        raise DiagnosticError(
            "an eigenvalue of I - A left the right half-plane",
            {"min_real_part": float(lam.real.min())},
        )
    return np.sum(np.log(lam), axis=-1)


def steepest_descent_values(theta, d, u, scale=1.0, log_offset=0.0):
    """Per-draw values of the steepest-descent integrand.

    Parameters
    ----------
    theta : ndarray, shape (..., n, n)
        Hollow symmetric matrices, broadcast against the leading axes of ``u``
        after inserting one axis (``theta[..., None, :, :]``).
    d : float
    u : ndarray, shape (..., S, n)
        Draws from ``eta_d``.
    scale : float or ndarray, shape (...)
        Contour scale ``lam``; the representation needs ``||theta|| < lam d``.
    log_offset : float or ndarray, shape (...)
        Added to the exponent before exponentiation, e.g. ``tr(theta^2)/(4d)``
        to divide by the Gaussian characteristic function without overflow.

    Returns
    -------
    ndarray, shape (..., S), complex
    """
    theta = np.asarray(theta, dtype=complex)
    n = theta.shape[-1]
    lam = np.asarray(scale, dtype=float)[..., None]
    flat = u.ravel()
    beta0 = (_ucotu(flat) + 1j * flat).reshape(u.shape)
    bprime = _re_beta_prime(flat).reshape(u.shape) + 1j
    a = (1j / d) * theta[..., None, :, :] / (lam[..., None] * beta0)[..., None, :]
    logdet = _log_det_one_minus(a, n)
    expo = -0.5 * d * logdet + np.asarray(log_offset)[..., None]
    # weight for the scaled contour Z = lam beta(U); vanishes at lam = 1
    expo = expo + n * (1.0 - 0.5 * d) * np.log(lam) + 0.5 * d * (lam - 1.0) * beta0.sum(-1)
    return np.prod(bprime / 1j, axis=-1) * np.exp(expo)


def auto_scale(norm, d, margin=1.05):
    """Contour scale used when none is given: ``max(1, margin ||Theta|| / d)``."""
    return max(1.0, margin * norm / d)


def _check_theta(theta, d, scale):
    theta = as_sym_matrix(theta)
    if not is_hollow(theta):
        raise DomainError("Theta must be hollow (zero diagonal)")
    if scale is None:
        return theta, auto_scale(op_norm(theta), d)
    if scale < 1.0:
        raise DomainError(f"contour scale must be >= 1, got {scale}")
    norm = op_norm(theta)
    if norm >= scale * d:
        raise DomainError(
            f"||Theta||_op = {norm:.6g} is not below scale * d = {scale * d:.6g}; "
            "increase the contour scale"
        )
    return theta, float(scale)


def spherical_wishart_cf(theta, d, samples, rng, *, batches=MIN_BATCHES, workers=1, scale=None):
    """Steepest-descent Monte Carlo estimate of ``phi_V(Theta)``.

    Parameters
    ----------
    theta : array_like, shape (n, n)
        Hollow complex symmetric matrix with ``||Theta||_op < scale * d``.
    d : int
    samples : int
        Total number of draws of ``U``.
    rng : int, SeedSequence or Generator
    batches, workers : int
        Batch layout and thread count; the estimate depends only on the
        former.
    scale : float, optional
        Contour scale ``lam >= 1``.  By default ``lam = 1`` unless
        ``||Theta||_op`` exceeds ``d / 1.05``, in which case
        ``lam = 1.05 ||Theta||_op / d``; smaller scales have smaller variance.

    Returns
    -------
    McEstimate
    """
    theta, scale = _check_theta(theta, d, scale)
    n = theta.shape[0]

    def batch(gen, size):
        out = np.empty(size, dtype=complex)
        for start in range(0, size, _EVAL_CHUNK):
            m = min(_EVAL_CHUNK, size - start)
            u = sample_eta(d, gen, (m, n))
            out[start:start + m] = steepest_descent_values(theta, d, u, scale)
        return out

    return run_batches(batch, samples, rng, batches=batches, workers=workers)


def spherical_wishart_cf_direct(theta, d, samples, rng, *, batches=MIN_BATCHES, workers=1):
    """Direct Monte Carlo estimate of ``E exp(i <V, Theta>)``.

    ``V`` is the hollow Gram matrix of ``n`` uniform sphere points.
    """
    theta = as_sym_matrix(theta)
    if not is_hollow(theta):
        raise DomainError("Theta must be hollow (zero diagonal)")
    n = theta.shape[0]
    rows, cols = np.triu_indices(n, 1)
    weights = theta[rows, cols]

    def batch(gen, size):
        out = np.empty(size, dtype=complex)
        for start in range(0, size, _EVAL_CHUNK):
            m = min(_EVAL_CHUNK, size - start)
            v = sample_gram(n, d, m, gen)[:, rows, cols]
            out[start:start + m] = np.exp(1j * (v @ weights))
        return out

    return run_batches(batch, samples, rng, batches=batches, workers=workers)


def phi_v_modulus_bound(theta, d):
    """Upper bound on ``|phi_V(Theta)|`` for ``d > 2n``.

    With ``A = I + Im(Theta)/d`` and ``a = ||A||_op`` the bound is

        C_d^n Gamma((d - 2n)/4) / Gamma(d/4) a^n det(A)^(-d/2)
            (1 + ||Re Theta||_F^2 / (d a)^2)^(n/2 - d/4),

    with ``C_d = Gamma(d/2 + 1) e^(d/2) / (2 sqrt(pi) (d/2)^(d/2))``.
    Requires ``d I + Im Theta`` positive definite.
    """
    theta = as_sym_matrix(theta)
    if not is_hollow(theta):
        raise DomainError("Theta must be hollow (zero diagonal)")
    n = theta.shape[0]
    if d <= 2 * n:
        raise DomainError(f"the bound needs d > 2n, got d={d}, n={n}")
    a_mat = np.eye(n) + theta.imag / d
    eig = np.linalg.eigvalsh(a_mat)
    if eig.min() <= 0:
        raise DomainError("d I + Im Theta is not positive definite")
    a = eig.max()
    k = 0.5 * d
    # log C_d = log Gamma(k + 1) + k - k log k - log(2 sqrt(pi))
    log_c = 0.5 * math.log(k) + 0.5 * LOG_2PI + stirling_tail(k) - math.log(2.0) - 0.5 * math.log(math.pi)
    log_bound = (
        n * log_c
        + gammaln((d - 2 * n) / 4.0)
        - gammaln(d / 4.0)
        + n * math.log(a)
        - k * np.sum(np.log(eig))
        + (0.5 * n - 0.25 * d) * math.log1p(frobenius_norm(theta.real) ** 2 / (d * a) ** 2)
    )
    return float(math.exp(log_bound))
